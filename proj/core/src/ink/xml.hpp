#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Minimal non-validating XML reader: elements, attributes, character data,
// entities, CDATA, comments, processing instructions and a DOCTYPE without
// an internal subset. Enough for InkML; not a general XML implementation.
namespace hmer::ink::xml {

struct Element {
  std::string name;  // local name, namespace prefix stripped
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<Element>> children;
  std::string text;  // concatenated direct character data
  std::size_t offset = 0;  // byte offset of '<'

  const std::string* attribute(std::string_view key) const;
};

/// Throws ParseError carrying the byte offset of the first problem.
std::unique_ptr<Element> parse(std::string_view document);

}  // namespace hmer::ink::xml
