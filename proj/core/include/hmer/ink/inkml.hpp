#pragma once

#include <string>
#include <string_view>

#include "hmer/ink/types.hpp"

namespace hmer::ink {

/// Reads the InkML subset used by handwriting corpora: every <trace> element
/// in document order becomes one stroke, keeping the first two channels (x, y)
/// of each comma-separated point. <annotation type="truth"> becomes the
/// annotation, <annotation type="UI"> the id (else `fallback_id`).
///
/// Throws ParseError (with byte offset) for malformed XML, an empty or
/// non-numeric trace, or a document without traces.
InkExpression parse_inkml(std::string_view document, const std::string& fallback_id = "");

/// Writes an expression in the same subset; parse_inkml reads it back exactly.
std::string write_inkml(const InkExpression& expression);

}  // namespace hmer::ink
