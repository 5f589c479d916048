#include "hmer/ink/lg_reader.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmer/error.hpp"

namespace hmer::ink {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Split {
  std::string prefix;
  std::optional<unsigned long long> number;
};

Split split_id(const std::string& id) {
  std::size_t k = id.size();
  while (k > 0 && std::isdigit(static_cast<unsigned char>(id[k - 1]))) --k;
  Split out{id.substr(0, k), std::nullopt};
  const bool letters = std::all_of(out.prefix.begin(), out.prefix.end(),
                                   [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; });
  if (k < id.size() && letters && id.size() - k < 19) out.number = std::stoull(id.substr(k));
  return out;
}

struct PendingEdge {
  std::string src, dst, label;
  std::size_t line;
};

struct Object {
  std::vector<std::string> strokes;
};

}  // namespace

labels::LabelGraph parse_lg(std::string_view text) {
  std::vector<std::string> order;           // stroke ids in declaration order
  std::map<std::string, std::string> symbol;  // stroke id -> label
  std::vector<PendingEdge> edges;
  std::map<std::string, Object> objects;
  std::vector<PendingEdge> relations;

  auto declare = [&](const std::string& id, const std::string& label, std::size_t line, bool strict) {
    if (id.empty()) throw ParseError("line " + std::to_string(line) + ": empty stroke id", line);
    auto [it, fresh] = symbol.emplace(id, label);
    if (!fresh) {
      if (strict) throw ParseError("line " + std::to_string(line) + ": duplicate stroke id '" + id + "'", line);
      if (it->second != label)
        throw ParseError("line " + std::to_string(line) + ": stroke '" + id + "' relabeled from '" + it->second +
                             "' to '" + label + "'",
                         line);
      return;
    }
    order.push_back(id);
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto f = fields(line);
    const std::string& tag = f[0];
    auto need = [&](std::size_t count) {
      if (f.size() < count)
        throw ParseError("line " + std::to_string(line_no) + ": '" + tag + "' line needs " + std::to_string(count) +
                             " fields, got " + std::to_string(f.size()),
                         line_no);
    };
    if (tag == "N") {
      need(3);
      declare(f[1], f[2], line_no, true);
    } else if (tag == "E") {
      need(4);
      edges.push_back({f[1], f[2], f[3], line_no});
    } else if (tag == "O") {
      need(5);
      if (objects.count(f[1]))
        throw ParseError("line " + std::to_string(line_no) + ": duplicate object id '" + f[1] + "'", line_no);
      Object& obj = objects[f[1]];
      for (std::size_t k = 4; k < f.size(); ++k) {
        declare(f[k], f[2], line_no, false);
        obj.strokes.push_back(f[k]);
      }
    } else if (tag == "R") {
      need(4);
      relations.push_back({f[1], f[2], f[3], line_no});
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown line tag '" + tag + "'", line_no);
    }
  }

  // Writing order.
  std::vector<std::string> sorted = order;
  std::vector<Split> parts;
  parts.reserve(order.size());
  for (const auto& id : order) parts.push_back(split_id(id));
  const bool numeric = !parts.empty() && std::all_of(parts.begin(), parts.end(), [&](const Split& s) {
    return s.number.has_value() && s.prefix == parts.front().prefix;
  });
  if (numeric) {
    std::vector<std::size_t> idx(order.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return *parts[a].number < *parts[b].number; });
    for (std::size_t i = 0; i < idx.size(); ++i) sorted[i] = order[idx[i]];
  }

  std::map<std::string, std::size_t> index;
  labels::LabelGraph graph;
  for (const auto& id : sorted) {
    index[id] = graph.node_labels.size();
    graph.node_labels.push_back(symbol[id]);
  }

  auto resolve = [&](const std::string& id, std::size_t line) {
    const auto it = index.find(id);
    if (it == index.end())
      throw ParseError("line " + std::to_string(line) + ": undeclared stroke id '" + id + "'", line);
    return it->second;
  };
  auto put = [&](std::size_t a, std::size_t b, const std::string& label, std::size_t line) {
    if (a == b) throw ParseError("line " + std::to_string(line) + ": self edge on stroke " + std::to_string(a), line);
    auto [it, fresh] = graph.edges.emplace(std::make_pair(a, b), label);
    if (!fresh && it->second != label)
      throw ParseError("line " + std::to_string(line) + ": conflicting labels '" + it->second + "' and '" + label +
                           "' on one edge",
                       line);
  };

  for (const auto& e : edges) put(resolve(e.src, e.line), resolve(e.dst, e.line), e.label, e.line);
  for (const auto& [id, obj] : objects)
    for (const auto& a : obj.strokes)
      for (const auto& b : obj.strokes)
        if (a != b) graph.edges[{index[a], index[b]}] = labels::kSameSymbol;
  for (const auto& r : relations) {
    const auto src = objects.find(r.src);
    const auto dst = objects.find(r.dst);
    if (src == objects.end() || dst == objects.end())
      throw ParseError("line " + std::to_string(r.line) + ": undeclared object id '" +
                           (src == objects.end() ? r.src : r.dst) + "'",
                       r.line);
    for (const auto& a : src->second.strokes)
      for (const auto& b : dst->second.strokes) put(index[a], index[b], r.label, r.line);
  }
  return graph;
}

}  // namespace hmer::ink
