#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace navseg::html {

enum class NodeType { kDocument, kElement, kText, kComment };

struct Attribute {
  std::string name;
  std::string value;

  bool operator==(const Attribute&) const = default;
};

/// Mutable arena node produced by the tree builder. Children refer to other
/// arena slots; slot 0 is always the document.
struct Node {
  NodeType type = NodeType::kElement;
  std::string name;  // lower-case element name (foreign elements keep case)
  std::vector<Attribute> attributes;
  std::string data;  // text or comment payload, UTF-8
  int parent = -1;
  std::vector<int> children;
  bool foreign = false;  // inside <svg> or <math>
};

struct Document {
  std::vector<Node> nodes;

  const Node& document() const { return nodes.front(); }
  /// The <html> element, or -1 if the document is empty (never happens for
  /// output of parse_document).
  int html_element() const;
};

/// Runs the HTML5 tokenizer and tree-construction algorithm over UTF-8 text.
/// Malformed markup is repaired the way a browser would; this never fails.
Document parse_document(std::string_view utf8);

/// True for the five HTML whitespace bytes (tab, LF, FF, CR, space).
constexpr bool is_html_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\f' || c == '\r';
}

}  // namespace navseg::html
