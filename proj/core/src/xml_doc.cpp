#include "xml_doc.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <sstream>

#include "roadgame/errors.hpp"

namespace roadgame::xml {

namespace pt = boost::property_tree;

const Node* Node::child(const std::string& name) const {
  for (const auto& c : children) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<const Node*> Node::children_named(const std::string& name) const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (c.name == name) out.push_back(&c);
  }
  return out;
}

const std::string* Node::attribute(const std::string& name) const {
  for (const auto& [k, v] : attributes) {
    if (k == name) return &v;
  }
  return nullptr;
}

namespace {

Node from_ptree(const std::string& name, const pt::ptree& tree) {
  Node node;
  node.name = name;
  for (const auto& [key, sub] : tree) {
    if (key == "<xmlattr>") {
      for (const auto& [ak, av] : sub) node.attributes.emplace_back(ak, av.data());
    } else if (key == "<xmltext>") {
      node.text += sub.data();
    } else if (key == "<xmlcomment>") {
      // dropped: comments are not part of the data model
    } else {
      node.children.push_back(from_ptree(key, sub));
    }
  }
  if (node.children.empty() && node.text.empty()) node.text = tree.data();
  return node;
}

void escape_into(const std::string& raw, std::string& out) {
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
}

void write_node(const Node& node, int depth, std::string& out) {
  out.append(static_cast<size_t>(depth) * 2, ' ');
  out += '<';
  out += node.name;
  for (const auto& [k, v] : node.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    escape_into(v, out);
    out += '"';
  }
  if (node.children.empty() && node.text.empty()) {
    out += "/>\n";
    return;
  }
  out += '>';
  if (node.children.empty()) {
    escape_into(node.text, out);
    out += "</";
    out += node.name;
    out += ">\n";
    return;
  }
  out += '\n';
  for (const auto& c : node.children) write_node(c, depth + 1, out);
  out.append(static_cast<size_t>(depth) * 2, ' ');
  out += "</";
  out += node.name;
  out += ">\n";
}

}  // namespace

Node parse(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    fail(ErrorCode::malformed_xml, e.message() + " (line " + std::to_string(e.line()) + ")");
  } catch (const std::exception& e) {
    fail(ErrorCode::malformed_xml, e.what());
  }
  for (const auto& [key, sub] : tree) {
    if (key != "<xmlattr>" && key != "<xmlcomment>") return from_ptree(key, sub);
  }
  fail(ErrorCode::malformed_xml, "document has no root element");
}

std::string write_document(const Node& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write_node(root, 0, out);
  return out;
}

std::string write_fragment(const Node& node) {
  std::string out;
  write_node(node, 0, out);
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

}  // namespace roadgame::xml
