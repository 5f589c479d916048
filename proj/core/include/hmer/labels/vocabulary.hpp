#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace hmer::labels {

/// Symbol and relation classes.
///
/// Edge classes are laid out as: the C_e positional relations in the order
/// given, then their opposites in the same order, then "*" (same symbol),
/// then "NoE". So C_2 = 2 * C_e + 2.
class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> symbols, std::vector<std::string> relations);

  /// The 101 handwritten-math symbol classes (sorted) and the six relations
  /// Right, Sup, Sub, Above, Below, Inside.
  static const Vocabulary& crohme();

  int symbol_count() const noexcept { return static_cast<int>(symbols_.size()); }
  int relation_count() const noexcept { return static_cast<int>(relations_.size()); }
  int edge_class_count() const noexcept { return 2 * relation_count() + 2; }

  int symbol_id(const std::string& label) const;
  const std::string& symbol(int id) const;
  bool has_symbol(const std::string& label) const { return symbol_index_.count(label) > 0; }

  /// Class id of a positional relation label (not its opposite).
  int relation_class(const std::string& label) const;
  bool has_relation(const std::string& label) const { return relation_index_.count(label) > 0; }
  int same_symbol_class() const noexcept { return 2 * relation_count(); }
  int no_edge_class() const noexcept { return 2 * relation_count() + 1; }

  bool is_positional(int edge_class) const noexcept { return edge_class >= 0 && edge_class < relation_count(); }
  bool is_opposite(int edge_class) const noexcept {
    return edge_class >= relation_count() && edge_class < 2 * relation_count();
  }

  /// Involution pairing r with its opposite. Throws ArgumentError for "*",
  /// "NoE", or an out-of-range id.
  int opposite(int edge_class) const;

  /// "Right", ..., "Right~" for opposites, "*", "NoE".
  std::string edge_class_name(int edge_class) const;

  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::vector<std::string>& relations() const noexcept { return relations_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.symbols_ == b.symbols_ && a.relations_ == b.relations_;
  }

 private:
  std::vector<std::string> symbols_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, int> symbol_index_;
  std::unordered_map<std::string, int> relation_index_;
};

}  // namespace hmer::labels
