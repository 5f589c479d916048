#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hmer/ink/types.hpp"
#include "hmer/labels/label_graph.hpp"

namespace hmer::ink {

struct LabeledExpression {
  InkExpression ink;
  labels::LabelGraph labels;

  friend bool operator==(const LabeledExpression&, const LabeledExpression&) = default;
};

/// Small handwritten-looking expressions built from stroke templates for
/// 0-9, +, -, x and fraction bars, laid out as baseline items (plain symbol,
/// superscript, subscript, fraction) joined by + and - operators. Labels use
/// Right, Sup, Sub, Above and Below. 4, 5, + and x are written with two
/// strokes. Symbol relations are expanded to every stroke pair and strokes
/// of one symbol are linked by "*" in both directions.
///
/// Output depends only on (seed, count, max_symbols). Each expression has
/// between 1 and max_symbols symbols.
std::vector<LabeledExpression> generate_synthetic(std::uint64_t seed, std::size_t count, std::size_t max_symbols);

/// Renders a single baseline row of the given symbols (each one of the
/// generator's alphabet) joined by Right relations.
LabeledExpression render_row(std::span<const std::string> symbols, std::uint64_t seed);

/// Symbols the generator can draw.
const std::vector<std::string>& synthetic_alphabet();

}  // namespace hmer::ink
