#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "navseg/encoding.hpp"
#include "navseg/html.hpp"

namespace navseg {

/// Depth-first (pre-order) index of a DOM node, starting from 1 at <html>.
struct NodeId {
  std::uint32_t value = 0;

  auto operator<=>(const NodeId&) const = default;
};

enum class NodeKind : std::uint8_t { kElement, kText, kComment };

struct DomNode {
  std::uint32_t index = 0;
  NodeKind kind = NodeKind::kElement;
  std::string tag;  // element name; "#text" or "#comment" for leaves
  std::vector<html::Attribute> attributes;
  std::string text;  // text / comment payload
  std::uint32_t parent = 0;  // 0 for the root
  std::vector<NodeId> children;
  std::uint32_t subtree_end = 0;  // largest index inside this subtree
  std::uint32_t depth = 0;
  // Words in text directly owned by this node: a text node's own words, or an
  // element's direct text children. Script/style text counts zero.
  std::uint32_t own_text_words = 0;

  bool is_element(std::string_view name) const { return kind == NodeKind::kElement && tag == name; }
  const std::string* attribute(std::string_view name) const;
};

struct HyperlinkRef {
  std::uint32_t index = 0;
  std::string href;
  std::uint32_t anchor_words = 0;

  bool operator==(const HyperlinkRef&) const = default;
};

struct WordCounts {
  std::uint64_t anchor_words = 0;
  std::uint64_t all_words = 0;

  bool operator==(const WordCounts&) const = default;
};

struct ParseOptions {
  DecodePolicy decode = DecodePolicy::kLossy;
};

/// Immutable, DFS-indexed view of a parsed page.
///
/// Node i (1-based) lives at nodes()[i - 1]; because indices are assigned in
/// pre-order, the subtree of node i is exactly the index range
/// [i, subtree_end(i)], which makes every subtree query a range query.
class IndexedDom {
 public:
  /// Indexes the tree rooted at the document's <html> element. Comments that
  /// sit outside <html> are not part of the indexed tree.
  static IndexedDom from_document(const html::Document& doc);

  std::size_t size() const { return nodes_.size(); }
  std::span<const DomNode> nodes() const { return nodes_; }
  NodeId root() const { return NodeId{1}; }
  /// Throws ContractViolation for ids outside this page.
  const DomNode& node(NodeId id) const;
  bool contains(NodeId id) const { return id.value >= 1 && id.value <= nodes_.size(); }

  std::optional<NodeId> body() const;
  /// Root for page-wide density: <body>, or the document root if absent.
  NodeId density_root() const { return body().value_or(root()); }

  std::span<const HyperlinkRef> hyperlinks() const { return links_; }
  /// Hyperlinks inside the subtree of `id` (including `id` itself), as a
  /// contiguous slice of hyperlinks().
  std::span<const HyperlinkRef> hyperlinks_in(NodeId id) const;
  /// Hyperlinks whose indices fall in [first, last].
  std::span<const HyperlinkRef> hyperlinks_in_range(std::uint32_t first, std::uint32_t last) const;
  const HyperlinkRef* hyperlink_at(std::uint32_t index) const;

  bool is_ancestor_or_self(NodeId ancestor, NodeId descendant) const;

  /// Word counts over the index range [first, last].
  WordCounts range_word_counts(std::uint32_t first, std::uint32_t last) const;

  /// Concatenated text of a subtree (script/style excluded), whitespace
  /// collapsed.
  std::string text_content(NodeId id) const;

 private:
  std::vector<DomNode> nodes_;
  std::vector<HyperlinkRef> links_;
  // Prefix sums over indices: entry i covers nodes 1..i.
  std::vector<std::uint64_t> all_prefix_;
  std::vector<std::uint64_t> anchor_prefix_;
  std::uint32_t body_ = 0;
};

/// Decodes and parses an HTML page. Only decoding can fail (DecodeError,
/// and only under DecodePolicy::kStrict).
IndexedDom parse_page(std::string_view bytes, const ParseOptions& options = {});

/// Anchor-text words and all words under a set of pairwise disjoint subtrees.
/// Throws ContractViolation for overlapping or foreign roots.
WordCounts subtree_word_counts(const IndexedDom& dom, std::span<const NodeId> roots);

}  // namespace navseg
