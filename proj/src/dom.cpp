#include "navseg/dom.hpp"

#include <algorithm>
#include <string>

#include "navseg/errors.hpp"

namespace navseg {
namespace {

bool is_unrendered_container(const html::Node& n) {
  return n.type == html::NodeType::kElement && !n.foreign &&
         (n.name == "script" || n.name == "style");
}

}  // namespace

const std::string* DomNode::attribute(std::string_view name) const {
  for (const auto& a : attributes)
    if (a.name == name) return &a.value;
  return nullptr;
}

IndexedDom IndexedDom::from_document(const html::Document& doc) {
  IndexedDom dom;
  int html_id = doc.html_element();
  if (html_id < 0) throw ContractViolation("document has no root element");

  struct Frame {
    int arena_id;
    std::uint32_t parent;
    std::uint32_t depth;
    bool in_anchor;
    bool unrendered;
  };
  std::vector<Frame> stack{{html_id, 0, 0, false, false}};
  std::vector<bool> anchor_text;  // per node: text inside an <a>
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const html::Node& src = doc.nodes[static_cast<std::size_t>(f.arena_id)];

    DomNode n;
    n.index = static_cast<std::uint32_t>(dom.nodes_.size() + 1);
    n.parent = f.parent;
    n.depth = f.depth;
    switch (src.type) {
      case html::NodeType::kElement:
        n.kind = NodeKind::kElement;
        n.tag = src.name;
        n.attributes = src.attributes;
        break;
      case html::NodeType::kText:
        n.kind = NodeKind::kText;
        n.tag = "#text";
        n.text = src.data;
        if (!f.unrendered) n.own_text_words = static_cast<std::uint32_t>(count_words(src.data));
        break;
      case html::NodeType::kComment:
      case html::NodeType::kDocument:
        n.kind = NodeKind::kComment;
        n.tag = "#comment";
        n.text = src.data;
        break;
    }
    bool is_anchor = n.kind == NodeKind::kElement && !src.foreign && n.tag == "a";
    if (f.parent != 0) dom.nodes_[f.parent - 1].children.push_back(NodeId{n.index});
    if (n.kind == NodeKind::kText && f.parent != 0)
      dom.nodes_[f.parent - 1].own_text_words += n.own_text_words;
    anchor_text.push_back(n.kind == NodeKind::kText && f.in_anchor);
    if (is_anchor) {
      HyperlinkRef ref;
      ref.index = n.index;
      if (const std::string* href = n.attribute("href")) ref.href = *href;
      dom.links_.push_back(std::move(ref));
    }

    bool unrendered = f.unrendered || is_unrendered_container(src);
    for (auto it = src.children.rbegin(); it != src.children.rend(); ++it)
      stack.push_back({*it, n.index, f.depth + 1, f.in_anchor || is_anchor, unrendered});
    dom.nodes_.push_back(std::move(n));
  }

  // Children carry larger indices than their parents, so a reverse sweep
  // sees every subtree finished before its root.
  for (std::size_t i = dom.nodes_.size(); i-- > 0;) {
    DomNode& n = dom.nodes_[i];
    n.subtree_end = n.children.empty() ? n.index : dom.nodes_[n.children.back().value - 1].subtree_end;
  }

  dom.all_prefix_.assign(dom.nodes_.size() + 1, 0);
  dom.anchor_prefix_.assign(dom.nodes_.size() + 1, 0);
  for (std::size_t i = 0; i < dom.nodes_.size(); ++i) {
    const DomNode& n = dom.nodes_[i];
    std::uint64_t words = n.kind == NodeKind::kText ? n.own_text_words : 0;
    dom.all_prefix_[i + 1] = dom.all_prefix_[i] + words;
    dom.anchor_prefix_[i + 1] = dom.anchor_prefix_[i] + (anchor_text[i] ? words : 0);
  }
  for (auto& link : dom.links_) {
    const DomNode& a = dom.nodes_[link.index - 1];
    link.anchor_words = static_cast<std::uint32_t>(dom.range_word_counts(a.index, a.subtree_end).all_words);
  }
  for (const DomNode& n : dom.nodes_) {
    if (n.is_element("body") && n.parent == 1) {
      dom.body_ = n.index;
      break;
    }
  }
  return dom;
}

const DomNode& IndexedDom::node(NodeId id) const {
  if (!contains(id))
    throw ContractViolation("node " + std::to_string(id.value) + " does not belong to this page");
  return nodes_[id.value - 1];
}

std::optional<NodeId> IndexedDom::body() const {
  if (body_ == 0) return std::nullopt;
  return NodeId{body_};
}

std::span<const HyperlinkRef> IndexedDom::hyperlinks_in_range(std::uint32_t first,
                                                              std::uint32_t last) const {
  auto lo = std::lower_bound(links_.begin(), links_.end(), first,
                             [](const HyperlinkRef& h, std::uint32_t v) { return h.index < v; });
  auto hi = std::upper_bound(lo, links_.end(), last,
                             [](std::uint32_t v, const HyperlinkRef& h) { return v < h.index; });
  return {lo, hi};
}

std::span<const HyperlinkRef> IndexedDom::hyperlinks_in(NodeId id) const {
  const DomNode& n = node(id);
  return hyperlinks_in_range(n.index, n.subtree_end);
}

const HyperlinkRef* IndexedDom::hyperlink_at(std::uint32_t index) const {
  auto it = std::lower_bound(links_.begin(), links_.end(), index,
                             [](const HyperlinkRef& h, std::uint32_t v) { return h.index < v; });
  if (it == links_.end() || it->index != index) return nullptr;
  return &*it;
}

bool IndexedDom::is_ancestor_or_self(NodeId ancestor, NodeId descendant) const {
  const DomNode& a = node(ancestor);
  return descendant.value >= a.index && descendant.value <= a.subtree_end;
}

WordCounts IndexedDom::range_word_counts(std::uint32_t first, std::uint32_t last) const {
  if (first < 1 || last > nodes_.size() || first > last)
    throw ContractViolation("index range [" + std::to_string(first) + ", " + std::to_string(last) +
                            "] is outside the page");
  return WordCounts{anchor_prefix_[last] - anchor_prefix_[first - 1],
                    all_prefix_[last] - all_prefix_[first - 1]};
}

std::string IndexedDom::text_content(NodeId id) const {
  const DomNode& root = node(id);
  std::string out;
  bool pending_space = false;
  for (std::uint32_t i = root.index; i <= root.subtree_end; ++i) {
    const DomNode& n = nodes_[i - 1];
    if (n.kind != NodeKind::kText) continue;
    // Script and style text carries no words; skip it.
    if (n.own_text_words == 0) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    for (char c : n.text) {
      if (html::is_html_space(c)) {
        pending_space = !out.empty();
      } else {
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
      }
    }
  }
  return out;
}

IndexedDom parse_page(std::string_view bytes, const ParseOptions& options) {
  DecodedText text = decode_html_bytes(bytes, options.decode);
  return IndexedDom::from_document(html::parse_document(text.utf8));
}

WordCounts subtree_word_counts(const IndexedDom& dom, std::span<const NodeId> roots) {
  std::vector<NodeId> sorted(roots.begin(), roots.end());
  for (NodeId r : sorted)
    if (!dom.contains(r))
      throw ContractViolation("root " + std::to_string(r.value) + " does not belong to this page");
  std::sort(sorted.begin(), sorted.end());
  WordCounts total;
  std::uint32_t covered_until = 0;
  for (NodeId r : sorted) {
    const DomNode& n = dom.node(r);
    if (r.value <= covered_until)
      throw ContractViolation("roots overlap at node " + std::to_string(r.value));
    WordCounts c = dom.range_word_counts(n.index, n.subtree_end);
    total.anchor_words += c.anchor_words;
    total.all_words += c.all_words;
    covered_until = n.subtree_end;
  }
  return total;
}

}  // namespace navseg
