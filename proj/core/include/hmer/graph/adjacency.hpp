#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hmer::graph {

/// Square 0/1 matrix, row-major.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(std::size_t n) : n_(n), bits_(n * n, 0) {}

  std::size_t size() const noexcept { return n_; }
  bool operator()(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool on = true) { bits_[i * n_ + j] = on ? 1 : 0; }
  void set_symmetric(std::size_t i, std::size_t j, bool on = true) {
    set(i, j, on);
    set(j, i, on);
  }

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::size_t edge_count() const;
  bool symmetric() const;

  friend bool operator==(const Adjacency&, const Adjacency&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

inline std::size_t Adjacency::edge_count() const {
  std::size_t count = 0;
  for (auto b : bits_) count += b;
  return count;
}

inline bool Adjacency::symmetric() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

}  // namespace hmer::graph
