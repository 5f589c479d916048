#include "hmer/ink/inkml.hpp"

#include <charconv>
#include <cctype>
#include <functional>

#include "hmer/error.hpp"
#include "xml.hpp"

namespace hmer::ink {
namespace {

std::string trace_name(const xml::Element& trace, std::size_t ordinal) {
  if (const auto* id = trace.attribute("id")) return "trace '" + *id + "'";
  return "trace #" + std::to_string(ordinal);
}

Stroke parse_trace(const xml::Element& trace, std::size_t ordinal) {
  Stroke stroke;
  stroke.index = ordinal;
  std::string_view text = trace.text;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tuple = text.substr(start, end - start);
    double values[2];
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < tuple.size()) {
      while (i < tuple.size() && std::isspace(static_cast<unsigned char>(tuple[i]))) ++i;
      if (i == tuple.size()) break;
      std::size_t j = i;
      while (j < tuple.size() && !std::isspace(static_cast<unsigned char>(tuple[j]))) ++j;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tuple.data() + i, tuple.data() + j, v);
      if (ec != std::errc() || ptr != tuple.data() + j) {
        throw ParseError(trace_name(trace, ordinal) + ": non-numeric value '" + std::string(tuple.substr(i, j - i)) + "'",
                         trace.offset);
      }
      if (count < 2) values[count] = v;
      ++count;
      i = j;
    }
    if (count == 1) {
      throw ParseError(trace_name(trace, ordinal) + ": point with a single channel", trace.offset);
    }
    if (count >= 2) stroke.points.push_back(Point{values[0], values[1]});
    if (end == text.size()) break;
    start = end + 1;
  }
  if (stroke.points.empty()) throw ParseError(trace_name(trace, ordinal) + " is empty", trace.offset);
  return stroke;
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void escape_into(std::string& out, std::string_view text) {
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

InkExpression parse_inkml(std::string_view document, const std::string& fallback_id) {
  const auto root = xml::parse(document);
  InkExpression expr;
  expr.id = fallback_id;
  std::function<void(const xml::Element&, bool)> walk = [&](const xml::Element& el, bool top) {
    if (el.name == "trace") {
      expr.strokes.push_back(parse_trace(el, expr.strokes.size()));
      return;
    }
    if (el.name == "annotation" && top) {
      const auto* type = el.attribute("type");
      if (type && *type == "truth" && !expr.annotation) expr.annotation = trimmed(el.text);
      if (type && *type == "UI") expr.id = trimmed(el.text);
      return;
    }
    for (const auto& child : el.children) walk(*child, false);
  };
  for (const auto& child : root->children) walk(*child, true);
  if (expr.strokes.empty()) throw ParseError("InkML document contains no trace elements", root->offset);
  return expr;
}

std::string write_inkml(const InkExpression& expression) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<ink xmlns=\"http://www.w3.org/2003/InkML\">\n";
  out += "<traceFormat>\n<channel name=\"X\" type=\"decimal\"/>\n<channel name=\"Y\" type=\"decimal\"/>\n</traceFormat>\n";
  if (expression.annotation) {
    out += "<annotation type=\"truth\">";
    escape_into(out, *expression.annotation);
    out += "</annotation>\n";
  }
  if (!expression.id.empty()) {
    out += "<annotation type=\"UI\">";
    escape_into(out, expression.id);
    out += "</annotation>\n";
  }
  for (std::size_t s = 0; s < expression.strokes.size(); ++s) {
    out += "<trace id=\"" + std::to_string(s) + "\">";
    const auto& pts = expression.strokes[s].points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out += ", ";
      append_number(out, pts[i].x);
      out += ' ';
      append_number(out, pts[i].y);
    }
    out += "</trace>\n";
  }
  out += "</ink>\n";
  return out;
}

}  // namespace hmer::ink
