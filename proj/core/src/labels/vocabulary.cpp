#include "hmer/labels/vocabulary.hpp"

#include <algorithm>

#include "hmer/error.hpp"

namespace hmer::labels {

Vocabulary::Vocabulary(std::vector<std::string> symbols, std::vector<std::string> relations)
    : symbols_(std::move(symbols)), relations_(std::move(relations)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (!symbol_index_.emplace(symbols_[i], static_cast<int>(i)).second)
      throw ArgumentError("duplicate symbol label '" + symbols_[i] + "'");
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    if (relations_[i] == "*" || relations_[i] == "NoE")
      throw ArgumentError("reserved relation label '" + relations_[i] + "'");
    if (!relation_index_.emplace(relations_[i], static_cast<int>(i)).second)
      throw ArgumentError("duplicate relation label '" + relations_[i] + "'");
  }
}

const Vocabulary& Vocabulary::crohme() {
  static const Vocabulary vocab = [] {
    std::vector<std::string> symbols = {
        "!",      "(",       ")",       "+",      "COMMA",   "-",      ".",      "/",      "0",      "1",
        "2",      "3",       "4",       "5",      "6",       "7",      "8",      "9",      "=",      "A",
        "B",      "C",       "E",       "F",      "G",       "H",      "I",      "L",      "M",      "N",
        "P",      "R",       "S",       "T",      "V",       "X",      "Y",      "[",      "\\Delta", "\\alpha",
        "\\beta", "\\cos",   "\\div",   "\\exists", "\\forall", "\\gamma", "\\geq", "\\gt",  "\\in",   "\\infty",
        "\\int",  "\\lambda", "\\ldots", "\\leq",  "\\lim",   "\\log",  "\\lt",   "\\mu",   "\\neq",  "\\phi",
        "\\pi",   "\\pm",    "\\prime", "\\rightarrow", "\\sigma", "\\sin", "\\sqrt", "\\sum", "\\tan", "\\theta",
        "\\times", "\\{",    "\\}",     "]",      "a",       "b",      "c",      "d",      "e",      "f",
        "g",      "h",       "i",       "j",      "k",       "l",      "m",      "n",      "o",      "p",
        "q",      "r",       "s",       "t",      "u",       "v",      "w",      "x",      "y",      "z",
        "|"};
    std::sort(symbols.begin(), symbols.end());
    return Vocabulary(std::move(symbols), {"Right", "Sup", "Sub", "Above", "Below", "Inside"});
  }();
  return vocab;
}

int Vocabulary::symbol_id(const std::string& label) const {
  const auto it = symbol_index_.find(label);
  if (it == symbol_index_.end()) throw DataError("unknown symbol label '" + label + "'");
  return it->second;
}

const std::string& Vocabulary::symbol(int id) const {
  if (id < 0 || id >= symbol_count()) throw ArgumentError("symbol id " + std::to_string(id) + " out of range");
  return symbols_[static_cast<std::size_t>(id)];
}

int Vocabulary::relation_class(const std::string& label) const {
  const auto it = relation_index_.find(label);
  if (it == relation_index_.end()) throw DataError("unknown relation label '" + label + "'");
  return it->second;
}

int Vocabulary::opposite(int edge_class) const {
  if (is_positional(edge_class)) return edge_class + relation_count();
  if (is_opposite(edge_class)) return edge_class - relation_count();
  throw ArgumentError("edge class " + std::to_string(edge_class) + " has no opposite");
}

std::string Vocabulary::edge_class_name(int edge_class) const {
  if (is_positional(edge_class)) return relations_[static_cast<std::size_t>(edge_class)];
  if (is_opposite(edge_class)) return relations_[static_cast<std::size_t>(edge_class - relation_count())] + "~";
  if (edge_class == same_symbol_class()) return "*";
  if (edge_class == no_edge_class()) return "NoE";
  throw ArgumentError("edge class " + std::to_string(edge_class) + " out of range");
}

}  // namespace hmer::labels
