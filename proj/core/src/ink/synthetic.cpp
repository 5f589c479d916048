#include "hmer/ink/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "hmer/error.hpp"

namespace hmer::ink {
namespace {

using Polyline = std::vector<Point>;
using Template = std::vector<Polyline>;  // strokes in writing order, unit box, y down

const std::map<std::string, Template>& templates() {
  static const std::map<std::string, Template> t = [] {
    std::map<std::string, Template> m;
    Polyline zero;
    for (int k = 0; k <= 16; ++k) {
      const double a = -M_PI / 2 - 2 * M_PI * k / 16.0;
      zero.push_back({0.5 + 0.42 * std::cos(a), 0.5 + 0.5 * std::sin(a)});
    }
    m["0"] = {zero};
    m["1"] = {{{0.3, 0.18}, {0.52, 0.0}, {0.52, 1.0}}};
    m["2"] = {{{0.1, 0.25}, {0.3, 0.02}, {0.7, 0.02}, {0.9, 0.25}, {0.8, 0.5}, {0.1, 1.0}, {0.9, 1.0}}};
    m["3"] = {{{0.1, 0.1}, {0.5, 0.0}, {0.85, 0.2}, {0.5, 0.48}, {0.9, 0.7}, {0.55, 1.0}, {0.1, 0.9}}};
    m["4"] = {{{0.6, 0.0}, {0.05, 0.65}, {0.95, 0.65}}, {{0.7, 0.3}, {0.7, 1.0}}};
    m["5"] = {{{0.2, 0.0}, {0.15, 0.45}, {0.6, 0.4}, {0.9, 0.7}, {0.6, 1.0}, {0.1, 0.9}}, {{0.2, 0.0}, {0.85, 0.0}}};
    m["6"] = {{{0.75, 0.0}, {0.3, 0.3}, {0.1, 0.7}, {0.4, 1.0}, {0.8, 0.8}, {0.6, 0.55}, {0.15, 0.7}}};
    m["7"] = {{{0.1, 0.0}, {0.9, 0.0}, {0.4, 1.0}}};
    m["8"] = {{{0.8, 0.1}, {0.5, 0.0}, {0.2, 0.15}, {0.5, 0.45}, {0.85, 0.75}, {0.5, 1.0}, {0.15, 0.75}, {0.5, 0.45},
               {0.8, 0.15}}};
    m["9"] = {{{0.85, 0.2}, {0.5, 0.0}, {0.15, 0.2}, {0.45, 0.45}, {0.85, 0.25}, {0.8, 1.0}}};
    m["+"] = {{{0.0, 0.5}, {1.0, 0.5}}, {{0.5, 0.0}, {0.5, 1.0}}};
    m["-"] = {{{0.0, 0.5}, {1.0, 0.5}}};
    m["x"] = {{{0.0, 0.0}, {1.0, 1.0}}, {{1.0, 0.0}, {0.0, 1.0}}};
    return m;
  }();
  return t;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Box {
  double x, y, w, h;
};

struct Placed {
  std::string label;
  Box box;
};

struct Relation {
  std::size_t src, dst;
  std::string label;
};

// Symbols in writing order plus symbol-level relations.
struct Layout {
  std::vector<Placed> symbols;
  std::vector<Relation> relations;
  std::string markup;

  std::size_t add(std::string label, Box box) {
    symbols.push_back({std::move(label), box});
    return symbols.size() - 1;
  }
};

const std::vector<std::string> kDigits = {"0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "x"};

std::string pick_atom(Rng& rng) { return kDigits[rng.below(kDigits.size())]; }

constexpr double kAtomW = 0.6;
constexpr double kGap = 0.25;

Box atom_box(double x, double y, double scale) { return {x, y, kAtomW * scale, scale}; }

Box operator_box(const std::string& op, double x) {
  return op == "+" ? Box{x, 0.25, 0.5, 0.5} : Box{x, 0.45, 0.5, 0.1};
}

// Places one baseline item starting at x; returns {head symbol, right edge}.
std::pair<std::size_t, double> place_item(Layout& layout, Rng& rng, std::size_t budget, double x) {
  enum Kind { kAtom, kSup, kSub, kFrac };
  std::vector<Kind> options = {kAtom};
  if (budget >= 2) options.insert(options.end(), {kSup, kSub});
  if (budget >= 3) options.insert(options.end(), {kFrac, kFrac});
  const Kind kind = options[rng.below(options.size())];

  if (kind == kAtom || kind == kSup || kind == kSub) {
    const std::string base_label = pick_atom(rng);
    const std::size_t base = layout.add(base_label, atom_box(x, 0.0, 1.0));
    layout.markup += base_label;
    double right = x + kAtomW;
    if (kind != kAtom) {
      const std::string script_label = pick_atom(rng);
      const double sx = right + 0.05;
      const double sy = kind == kSup ? -0.35 : 0.75;
      const std::size_t script = layout.add(script_label, atom_box(sx, sy, 0.55));
      layout.relations.push_back({base, script, kind == kSup ? "Sup" : "Sub"});
      layout.markup += (kind == kSup ? "^{" : "_{") + script_label + "}";
      right = sx + kAtomW * 0.55;
    }
    return {base, right};
  }

  // Fraction: numerator row, bar, denominator row, each row 1-2 atoms.
  const std::size_t room = budget - 1;
  const std::size_t num_n = room >= 3 && rng.below(2) ? 2 : 1;
  const std::size_t den_n = room - num_n >= 2 && rng.below(2) ? 2 : 1;
  const double s = 0.8;
  auto row_width = [&](std::size_t k) { return static_cast<double>(k) * kAtomW * s + (k - 1) * kGap * s; };
  const double bar_w = std::max(row_width(num_n), row_width(den_n)) + 0.3;
  std::vector<std::string> num_labels, den_labels;
  for (std::size_t k = 0; k < num_n; ++k) num_labels.push_back(pick_atom(rng));
  for (std::size_t k = 0; k < den_n; ++k) den_labels.push_back(pick_atom(rng));

  auto place_row = [&](const std::vector<std::string>& labels, double top) {
    double cx = x + (bar_w - row_width(labels.size())) / 2;
    std::size_t first = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const std::size_t id = layout.add(labels[k], atom_box(cx, top, s));
      if (k == 0) first = id;
      else layout.relations.push_back({id - 1, id, "Right"});
      cx += (kAtomW + kGap) * s;
    }
    return first;
  };
  const std::size_t num_first = place_row(num_labels, 0.5 - 0.12 - s);
  const std::size_t bar = layout.add("-", Box{x, 0.47, bar_w, 0.06});
  const std::size_t den_first = place_row(den_labels, 0.5 + 0.12);
  layout.relations.push_back({bar, num_first, "Above"});
  layout.relations.push_back({bar, den_first, "Below"});

  layout.markup += "\\frac{";
  for (const auto& l : num_labels) layout.markup += l;
  layout.markup += "}{";
  for (const auto& l : den_labels) layout.markup += l;
  layout.markup += "}";
  return {bar, x + bar_w};
}

Layout random_layout(Rng& rng, std::size_t max_symbols) {
  Layout layout;
  std::size_t budget = 1 + rng.below(max_symbols);
  double x = 0.0;
  auto [head, right] = place_item(layout, rng, budget, x);
  budget -= layout.symbols.size();
  while (budget >= 2) {
    const std::string op = rng.below(2) ? "+" : "-";
    x = right + kGap;
    const std::size_t op_id = layout.add(op, operator_box(op, x));
    layout.markup += op;
    layout.relations.push_back({head, op_id, "Right"});
    const std::size_t before = layout.symbols.size();
    auto [next, next_right] = place_item(layout, rng, budget - 1, x + 0.5 + kGap);
    layout.relations.push_back({op_id, next, "Right"});
    budget -= 1 + (layout.symbols.size() - before);
    head = next;
    right = next_right;
  }
  return layout;
}

Polyline densify(const Polyline& ctrl, const Box& box, double device, Rng& rng) {
  // Slightly perturbed control points, then interpolated at an uneven pen speed.
  const double wobble = 0.03 * std::max(box.h, 0.3);
  Polyline pts;
  for (const Point& c : ctrl)
    pts.push_back({box.x + c.x * box.w + rng.uniform(-wobble, wobble), box.y + c.y * box.h + rng.uniform(-wobble, wobble)});
  Polyline out;
  out.push_back(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double len = std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
    const double speed = rng.uniform(0.03, 0.09);
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / speed)));
    for (std::size_t k = 1; k <= steps; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(steps);
      out.push_back({pts[i - 1].x + t * (pts[i].x - pts[i - 1].x), pts[i - 1].y + t * (pts[i].y - pts[i - 1].y)});
    }
  }
  for (Point& p : out) {
    p.x = std::round(p.x * device * 100.0) / 100.0;
    p.y = std::round(p.y * device * 100.0) / 100.0;
  }
  return out;
}

LabeledExpression render(const Layout& layout, Rng& rng, std::string id) {
  LabeledExpression out;
  out.ink.id = std::move(id);
  out.ink.annotation = layout.markup;
  const double device = rng.uniform(80.0, 120.0);
  std::vector<std::vector<std::size_t>> strokes_of(layout.symbols.size());
  for (std::size_t s = 0; s < layout.symbols.size(); ++s) {
    const auto& placed = layout.symbols[s];
    const auto it = templates().find(placed.label);
    if (it == templates().end()) throw ArgumentError("no stroke template for symbol '" + placed.label + "'");
    Box box = placed.box;
    const double jitter = rng.uniform(0.92, 1.08);
    box.x += rng.uniform(-0.04, 0.04);
    box.y += rng.uniform(-0.04, 0.04);
    box.w *= jitter;
    box.h *= jitter;
    for (const auto& ctrl : it->second) {
      Stroke stroke;
      stroke.index = out.ink.strokes.size();
      stroke.points = densify(ctrl, box, device, rng);
      strokes_of[s].push_back(stroke.index);
      out.ink.strokes.push_back(std::move(stroke));
      out.labels.node_labels.push_back(placed.label);
    }
  }
  for (const auto& members : strokes_of)
    for (auto a : members)
      for (auto b : members)
        if (a != b) out.labels.add_edge(a, b, labels::kSameSymbol);
  for (const auto& rel : layout.relations)
    for (auto a : strokes_of[rel.src])
      for (auto b : strokes_of[rel.dst]) out.labels.add_edge(a, b, rel.label);
  return out;
}

}  // namespace

const std::vector<std::string>& synthetic_alphabet() {
  static const std::vector<std::string> alphabet = [] {
    std::vector<std::string> out;
    for (const auto& [label, strokes] : templates()) out.push_back(label);
    return out;
  }();
  return alphabet;
}

std::vector<LabeledExpression> generate_synthetic(std::uint64_t seed, std::size_t count, std::size_t max_symbols) {
  if (count == 0) throw ArgumentError("generate_synthetic: count must be at least 1");
  if (max_symbols == 0) throw ArgumentError("generate_synthetic: max_symbols must be at least 1");
  std::vector<LabeledExpression> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(mix(seed, k));
    const Layout layout = random_layout(rng, max_symbols);
    out.push_back(render(layout, rng, "synth_" + std::to_string(seed) + "_" + std::to_string(k)));
  }
  return out;
}

LabeledExpression render_row(std::span<const std::string> symbols, std::uint64_t seed) {
  if (symbols.empty()) throw ArgumentError("render_row: no symbols");
  Layout layout;
  double x = 0.0;
  for (const auto& label : symbols) {
    const bool op = label == "+" || label == "-";
    const Box box = op ? operator_box(label, x) : atom_box(x, 0.0, 1.0);
    const std::size_t id = layout.add(label, box);
    if (id > 0) layout.relations.push_back({id - 1, id, "Right"});
    layout.markup += label;
    x += box.w + kGap;
  }
  Rng rng(mix(seed, 0xC0FFEE));
  return render(layout, rng, "row_" + std::to_string(seed));
}

}  // namespace hmer::ink
