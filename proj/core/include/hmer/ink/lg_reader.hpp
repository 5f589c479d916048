#pragma once

#include <string_view>

#include "hmer/labels/label_graph.hpp"

namespace hmer::ink {

/// Reads a stroke label graph in LG text form.
///
///   N, <strokeId>, <symbol>, <weight>
///   E, <strokeId>, <strokeId>, <relation or *>, <weight>
///   O, <objectId>, <symbol>, <weight>, <strokeId>, ...
///   R, <objectId>, <objectId>, <relation>, <weight>
///
/// '#' starts a comment line; blank lines are skipped. Object (O/R) lines are
/// expanded to stroke-level labels and edges. Stroke ids are mapped to
/// writing order: numerically when every id is an optional shared letter
/// prefix followed by digits (s0, s1, ... or 0, 1, ...), otherwise in
/// declaration order.
///
/// Throws ParseError carrying the 1-based line number for an unknown tag, a
/// short line, a duplicate stroke id, or a reference to an undeclared id.
labels::LabelGraph parse_lg(std::string_view text);

}  // namespace hmer::ink
