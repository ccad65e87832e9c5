#include <gtest/gtest.h>

#include <numeric>

#include "navseg/dom.hpp"
#include "navseg/encoding.hpp"
#include "navseg/errors.hpp"
#include "navseg/html.hpp"
#include "support/fixtures.hpp"

using namespace navseg;

namespace {

std::vector<std::string> tags(const IndexedDom& dom) {
  std::vector<std::string> out;
  for (const auto& n : dom.nodes()) out.push_back(n.tag);
  return out;
}

}  // namespace

TEST(Encoding, CountWordsSplitsOnUnicodeWhitespace) {
  EXPECT_EQ(count_words(""), 0u);
  EXPECT_EQ(count_words("   \n\t"), 0u);
  EXPECT_EQ(count_words("home"), 1u);
  EXPECT_EQ(count_words("  read   more, now! "), 3u);
  EXPECT_EQ(count_words("a\xc2\xa0" "b"), 2u);            // no-break space
  EXPECT_EQ(count_words("a\xe3\x80\x80" "b\xe2\x80\x83" "c"), 3u);  // ideographic, em space
  EXPECT_EQ(count_words("caf\xc3\xa9 au lait"), 3u);
}

TEST(Encoding, SniffPrefersBomThenMeta) {
  EXPECT_EQ(sniff_encoding("\xEF\xBB\xBF<p>x"), "utf-8");
  EXPECT_EQ(sniff_encoding(std::string("\xFF\xFE<\0", 4)), "utf-16le");
  EXPECT_EQ(sniff_encoding(std::string("\xFE\xFF\0<", 4)), "utf-16be");
  EXPECT_EQ(sniff_encoding("<meta charset=\"iso-8859-1\"><p>x"), "windows-1252");
  EXPECT_EQ(sniff_encoding("<meta http-equiv=\"Content-Type\" content=\"text/html; charset=windows-1252\">"),
            "windows-1252");
  EXPECT_EQ(sniff_encoding("<p>plain"), "utf-8");
}

TEST(Encoding, Windows1252MapsHighBytes) {
  auto d = decode_html_bytes("<meta charset=windows-1252>caf\xe9 \x93q\x94");
  EXPECT_EQ(d.encoding, "windows-1252");
  EXPECT_NE(d.utf8.find("caf\xc3\xa9"), std::string::npos);
  EXPECT_NE(d.utf8.find("\xe2\x80\x9cq\xe2\x80\x9d"), std::string::npos);
}

TEST(Encoding, LossyReplacesAndStrictReportsOffset) {
  std::string bad = "ab\xC3(cd";
  auto d = decode_html_bytes(bad);
  EXPECT_EQ(d.utf8, "ab\xEF\xBF\xBD(cd");
  try {
    decode_html_bytes(bad, DecodePolicy::kStrict);
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
}

TEST(Dom, TwoAnchorsInBody) {
  auto dom = parse_page("<body><a>x</a><a>y z</a></body>");
  EXPECT_EQ(tags(dom), (std::vector<std::string>{"html", "head", "body", "a", "#text", "a", "#text"}));
  ASSERT_EQ(dom.hyperlinks().size(), 2u);
  EXPECT_EQ(dom.hyperlinks()[0].index, 4u);
  EXPECT_EQ(dom.hyperlinks()[0].anchor_words, 1u);
  EXPECT_EQ(dom.hyperlinks()[1].index, 6u);
  EXPECT_EQ(dom.hyperlinks()[1].anchor_words, 2u);
  EXPECT_EQ(dom.body()->value, 3u);
}

TEST(Dom, EmptyDocumentGetsSkeleton) {
  auto dom = parse_page("");
  EXPECT_EQ(tags(dom), (std::vector<std::string>{"html", "head", "body"}));
  EXPECT_TRUE(dom.hyperlinks().empty());
}

TEST(Dom, TreeShapeOfSmallPage) {
  auto dom = parse_page(
      "<html><body><div><p>Some text here</p><img src=\"a.png\"><a href=\"/x\">go</a></div></body></html>");
  EXPECT_EQ(tags(dom), (std::vector<std::string>{"html", "head", "body", "div", "p", "#text", "img", "a", "#text"}));
  const auto& div = dom.node(NodeId{4});
  ASSERT_EQ(div.children.size(), 3u);
  EXPECT_EQ(div.subtree_end, 9u);
  EXPECT_EQ(dom.node(NodeId{7}).children.size(), 0u);
  EXPECT_EQ(dom.node(NodeId{5}).own_text_words, 3u);
  EXPECT_EQ(dom.node(NodeId{4}).own_text_words, 0u);
}

TEST(Dom, ImageOnlyAnchorHasNoWords) {
  auto dom = parse_page("<a href=\"/ad\"><img src=\"b.png\"></a>");
  ASSERT_EQ(dom.hyperlinks().size(), 1u);
  EXPECT_EQ(dom.hyperlinks()[0].anchor_words, 0u);
  EXPECT_EQ(dom.hyperlinks()[0].href, "/ad");
}

TEST(Dom, ScriptAndStyleCountNoWords) {
  auto dom = parse_page("<style>p { x: y }</style><p>one two</p><script>var a = 1;</script>");
  auto all = dom.range_word_counts(1, static_cast<std::uint32_t>(dom.size()));
  EXPECT_EQ(all.all_words, 2u);
  EXPECT_EQ(dom.text_content(dom.root()), "one two");
}

TEST(Dom, NestedAnchorsAreRepairedIntoSiblings) {
  auto dom = parse_page("<body><a href=1>outer <a href=2>inner</a></a></body>");
  ASSERT_EQ(dom.hyperlinks().size(), 2u);
  EXPECT_EQ(dom.hyperlinks()[0].href, "1");
  EXPECT_EQ(dom.hyperlinks()[1].href, "2");
  EXPECT_FALSE(dom.is_ancestor_or_self(NodeId{dom.hyperlinks()[0].index}, NodeId{dom.hyperlinks()[1].index}));
}

TEST(Dom, CommentsInsideHtmlAreIndexed) {
  auto dom = parse_page("<!-- outside --><html><body><!-- in --><p>x</p></body></html>");
  EXPECT_EQ(tags(dom), (std::vector<std::string>{"html", "head", "body", "#comment", "p", "#text"}));
}

TEST(Dom, NodeOutsidePageIsContractViolation) {
  auto dom = parse_page("<p>x</p>");
  EXPECT_THROW(dom.node(NodeId{0}), ContractViolation);
  EXPECT_THROW(dom.node(NodeId{static_cast<std::uint32_t>(dom.size() + 1)}), ContractViolation);
}

TEST(SubtreeWordCounts, SpecCases) {
  auto dom = parse_page("<body><a href=h>home</a><div><p>one two three</p><a href=x>four five</a></div><div><img></div></body>");
  auto links = dom.hyperlinks();
  ASSERT_EQ(links.size(), 2u);
  NodeId anchor{links[0].index};
  EXPECT_EQ(subtree_word_counts(dom, std::span(&anchor, 1)), (WordCounts{1, 1}));
  NodeId div{links[0].index + 2};
  ASSERT_TRUE(dom.node(div).is_element("div"));
  EXPECT_EQ(subtree_word_counts(dom, std::span(&div, 1)), (WordCounts{2, 5}));
  NodeId empty_div{dom.node(div).subtree_end + 1};
  ASSERT_TRUE(dom.node(empty_div).is_element("div"));
  EXPECT_EQ(subtree_word_counts(dom, std::span(&empty_div, 1)), (WordCounts{0, 0}));
}

TEST(SubtreeWordCounts, OverlappingRootsRejected) {
  auto dom = parse_page("<div><p>a b</p></div>");
  std::vector<NodeId> roots{NodeId{4}, NodeId{5}};
  EXPECT_THROW(subtree_word_counts(dom, roots), ContractViolation);
  std::vector<NodeId> foreign{NodeId{999}};
  EXPECT_THROW(subtree_word_counts(dom, foreign), ContractViolation);
}

TEST(Dom, HandBuiltFixtureIndices) {
  auto dom = support::indexed_tree_fixture();
  ASSERT_EQ(dom.size(), 12u);
  std::vector<std::uint32_t> idx;
  for (const auto& l : dom.hyperlinks()) idx.push_back(l.index);
  EXPECT_EQ(idx, (std::vector<std::uint32_t>{6, 8, 12}));
  EXPECT_EQ(dom.node(NodeId{2}).subtree_end, 9u);
  EXPECT_EQ(dom.node(NodeId{10}).subtree_end, 12u);
  auto in2 = dom.hyperlinks_in(NodeId{2});
  EXPECT_EQ(in2.size(), 2u);
}

class RandomPages : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomPages, DfsIndexingInvariants) {
  support::RandomHtml gen(GetParam());
  for (int round = 0; round < 20; ++round) {
    auto dom = parse_page(gen.page());
    auto nodes = dom.nodes();
    ASSERT_GE(nodes.size(), 3u);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      ASSERT_EQ(n.index, i + 1);
      ASSERT_GE(n.subtree_end, n.index);
      ASSERT_LE(n.subtree_end, nodes.size());
      if (n.index == 1) {
        EXPECT_EQ(n.parent, 0u);
        EXPECT_EQ(n.subtree_end, nodes.size());
      } else {
        // Pre-order: a parent precedes its child and its range covers it.
        const auto& p = dom.node(NodeId{n.parent});
        ASSERT_LT(p.index, n.index);
        ASSERT_LE(n.subtree_end, p.subtree_end);
        EXPECT_EQ(n.depth, p.depth + 1);
      }
      std::uint32_t expect = n.index + 1;
      for (NodeId c : n.children) {
        ASSERT_EQ(c.value, expect);
        expect = dom.node(c).subtree_end + 1;
      }
      EXPECT_EQ(expect, n.subtree_end + 1);
    }
    // Hyperlinks are the anchor elements in document order.
    std::vector<std::uint32_t> anchors;
    for (const auto& n : nodes)
      if (n.is_element("a")) anchors.push_back(n.index);
    std::vector<std::uint32_t> listed;
    for (const auto& l : dom.hyperlinks()) listed.push_back(l.index);
    EXPECT_EQ(listed, anchors);
  }
}

TEST_P(RandomPages, WordCountsAreAdditive) {
  support::RandomHtml gen(GetParam() ^ 0x5bd1e995);
  for (int round = 0; round < 20; ++round) {
    auto dom = parse_page(gen.page());
    // Children of <body> are disjoint subtrees.
    const auto& body = dom.node(dom.density_root());
    std::vector<NodeId> roots(body.children.begin(), body.children.end());
    WordCounts sum;
    for (NodeId r : roots) {
      auto w = subtree_word_counts(dom, std::span(&r, 1));
      sum.anchor_words += w.anchor_words;
      sum.all_words += w.all_words;
    }
    EXPECT_EQ(subtree_word_counts(dom, roots), sum);
    // Per-node ownership adds up to the whole range.
    std::uint64_t owned = 0;
    for (const auto& n : dom.nodes())
      if (n.kind == NodeKind::kText) owned += n.own_text_words;
    EXPECT_EQ(dom.range_word_counts(1, static_cast<std::uint32_t>(dom.size())).all_words, owned);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomPages, ::testing::Range<std::uint64_t>(1, 26));
