#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "navseg/dom.hpp"
#include "navseg/html.hpp"
#include "navseg/random.hpp"

namespace navseg::support {

/// Builds a document arena by hand, bypassing the parser.
class TreeBuilder {
 public:
  TreeBuilder() { doc_.nodes.push_back({html::NodeType::kDocument, "#document", {}, "", -1, {}, false}); }

  int element(int parent, std::string name, std::vector<html::Attribute> attrs = {}) {
    return add(parent, {html::NodeType::kElement, std::move(name), std::move(attrs), "", parent, {}, false});
  }
  int text(int parent, std::string data) {
    return add(parent, {html::NodeType::kText, "", {}, std::move(data), parent, {}, false});
  }
  html::Document take() { return std::move(doc_); }

 private:
  int add(int parent, html::Node n) {
    int id = static_cast<int>(doc_.nodes.size());
    doc_.nodes.push_back(std::move(n));
    doc_.nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
  }
  html::Document doc_;
};

/// Twelve-node indexed tree whose hyperlink leaves sit at 6, 8 and 12, with
/// node 2 spanning {6, 8} and node 11 holding 12:
///
///   1 html
///     2 div
///       3 div
///         4 #text
///         5 p
///           6 a
///         7 span
///           8 a
///       9 #text
///     10 div
///       11 p
///         12 a
inline IndexedDom indexed_tree_fixture() {
  TreeBuilder b;
  int html_el = b.element(0, "html");
  int outer = b.element(html_el, "div");
  int inner = b.element(outer, "div");
  b.text(inner, "intro words");
  int p = b.element(inner, "p");
  b.element(p, "a", {{"href", "/a"}});
  int span = b.element(inner, "span");
  b.element(span, "a", {{"href", "/b"}});
  b.text(outer, "tail");
  int right = b.element(html_el, "div");
  int p2 = b.element(right, "p");
  b.element(p2, "a", {{"href", "/c"}});
  return IndexedDom::from_document(b.take());
}

/// Random, frequently malformed markup: nested containers, anchors (some
/// nested, some image-only), prose, comments, scripts and stray end tags.
class RandomHtml {
 public:
  explicit RandomHtml(std::uint64_t seed) : rng_(seed) {}

  std::string page(int max_depth = 5, int max_children = 5) {
    std::string out = rng_.uniform01() < 0.5 ? "<!DOCTYPE html>" : "";
    if (rng_.uniform01() < 0.3) out += "<!-- lead -->";
    out += "<html><head><title>" + words(2) + "</title></head><body>";
    children(out, max_depth, max_children);
    out += "</body></html>";
    return out;
  }

  std::string words(std::uint64_t n) {
    static const char* kWords[] = {"alpha", "beta", "gamma", "delta", "news", "home", "read", "more",
                                   "x", "caf\xc3\xa9", "&amp;", "a\xc2\xa0" "b"};
    std::string s;
    for (std::uint64_t i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += kWords[rng_.uniform_int(0, std::size(kWords) - 1)];
    }
    return s;
  }

 private:
  void children(std::string& out, int depth, int max_children) {
    std::uint64_t n = rng_.uniform_int(0, static_cast<std::uint64_t>(max_children));
    for (std::uint64_t i = 0; i < n; ++i) node(out, depth - 1, max_children);
  }

  void node(std::string& out, int depth, int max_children) {
    static const char* kContainers[] = {"div", "ul", "li", "p", "span", "section", "table", "td", "b", "i"};
    double r = rng_.uniform01();
    if (depth <= 0 || r < 0.25) {
      out += words(rng_.uniform_int(0, 6));
      if (rng_.uniform01() < 0.3) out += "\n  ";
      return;
    }
    if (r < 0.45) {
      out += "<a href=\"/p/" + std::to_string(rng_.uniform_int(0, 50)) + "\">";
      if (rng_.uniform01() < 0.15) out += "<img src=\"x.png\">";
      else if (rng_.uniform01() < 0.1) node(out, depth - 1, 2);
      else out += words(rng_.uniform_int(0, 4));
      out += "</a>";
      return;
    }
    if (r < 0.5) {
      out += "<!-- c " + words(1) + " -->";
      return;
    }
    if (r < 0.53) {
      out += "<script>var s = '<a href=x>no</a>';</script>";
      return;
    }
    if (r < 0.55) {
      out += "</" + std::string(kContainers[rng_.uniform_int(0, std::size(kContainers) - 1)]) + ">";
      return;
    }
    const char* tag = kContainers[rng_.uniform_int(0, std::size(kContainers) - 1)];
    out += std::string("<") + tag + ">";
    children(out, depth, max_children);
    if (rng_.uniform01() < 0.9) out += std::string("</") + tag + ">";
  }

  Rng rng_;
};

}  // namespace navseg::support
