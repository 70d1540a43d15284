#pragma once

#include <string>
#include <utility>
#include <vector>

namespace roadgame::xml {

/// Minimal element-tree view of an XML document. Mixed content is not
/// modelled: an element carries either text or child elements.
struct Node {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;
  std::string text;

  const Node* child(const std::string& name) const;
  std::vector<const Node*> children_named(const std::string& name) const;
  const std::string* attribute(const std::string& name) const;
};

/// Parses a complete document and returns its root element.
/// Throws Error(malformed_xml) on anything that is not well-formed.
Node parse(const std::string& text);

/// Canonical writer: 2-space indentation, deterministic output, XML escaping.
/// write(parse(write(n))) == write(n).
std::string write_document(const Node& root);

/// Writes a single element (no XML declaration), used for opaque extras.
std::string write_fragment(const Node& node);

}  // namespace roadgame::xml
