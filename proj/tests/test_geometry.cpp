#include <gtest/gtest.h>

#include <algorithm>

#include "navseg/dom.hpp"
#include "navseg/errors.hpp"
#include "navseg/geometry.hpp"
#include "navseg/random.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace navseg;

namespace {

std::string words(int n, const char* w = "word") {
  std::string s;
  for (int i = 0; i < n; ++i) s += std::string(i ? " " : "") + w;
  return s;
}

}  // namespace

TEST(DomDistance, Examples) {
  HyperlinkRef a{6, "", 0}, b{8, "", 0}, c{12, "", 0};
  EXPECT_EQ(dom_distance(a, b), 2u);
  EXPECT_EQ(dom_distance(a, a), 0u);
  EXPECT_EQ(dom_distance(b, c), 4u);
}

TEST(DomDistance, IsAMetric) {
  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    HyperlinkRef x{static_cast<std::uint32_t>(rng.uniform_int(1, 1000)), "", 0};
    HyperlinkRef y{static_cast<std::uint32_t>(rng.uniform_int(1, 1000)), "", 0};
    HyperlinkRef z{static_cast<std::uint32_t>(rng.uniform_int(1, 1000)), "", 0};
    EXPECT_EQ(dom_distance(x, y), dom_distance(y, x));
    EXPECT_EQ(dom_distance(x, y) == 0, x.index == y.index);
    EXPECT_LE(dom_distance(x, z), dom_distance(x, y) + dom_distance(y, z));
  }
}

TEST(BlockGap, FixtureTree) {
  auto dom = support::indexed_tree_fixture();
  auto links = dom.hyperlinks();
  EXPECT_EQ(block_gap(links.subspan(0, 2), links.subspan(2, 1)), 4u);
  std::vector<std::uint32_t> b1{6, 8}, b2{12};
  EXPECT_EQ(block_gap(b1, b2), 4u);
}

TEST(BlockGap, Examples) {
  std::vector<std::uint32_t> s1{3}, s2{17}, wide{1, 100}, mid{50};
  EXPECT_EQ(block_gap(s1, s2), 14u);
  EXPECT_EQ(block_gap(wide, mid), 49u);
  std::vector<std::uint32_t> empty;
  EXPECT_THROW(block_gap(empty, s1), ContractViolation);
  EXPECT_THROW(block_gap(wide, wide), ContractViolation);
}

TEST(BlockGap, BetweenAdjacentRunsIsANeighbourDistance) {
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::uint32_t> idx;
    std::uint32_t cur = 0;
    for (std::uint64_t k = rng.uniform_int(2, 40); k > 0; --k) idx.push_back(cur += static_cast<std::uint32_t>(rng.uniform_int(1, 30)));
    std::size_t cut = rng.uniform_int(1, idx.size() - 1);
    std::span<const std::uint32_t> all(idx);
    std::uint32_t g = block_gap(all.subspan(0, cut), all.subspan(cut));
    EXPECT_EQ(g, idx[cut] - idx[cut - 1]);
  }
}

TEST(HyperlinkDensity, Examples) {
  EXPECT_DOUBLE_EQ(hyperlink_density(WordCounts{0, 0}, 1e-10), 1.0);
  EXPECT_NEAR(hyperlink_density(WordCounts{2, 5}, 1e-10), 0.4, 1e-10);
  EXPECT_NEAR(hyperlink_density(WordCounts{7, 7}, 1e-10), 1.0, 1e-12);
  auto dom = parse_page("<div><p>one two three</p><a href=x>four five</a></div>");
  NodeId div{4};
  EXPECT_NEAR(hyperlink_density(dom, std::span(&div, 1), 1e-10), 0.4, 1e-10);
}

TEST(HyperlinkDensity, Monotone) {
  Rng rng(17);
  for (int t = 0; t < 500; ++t) {
    WordCounts w{rng.uniform_int(0, 50), 0};
    w.all_words = w.anchor_words + rng.uniform_int(0, 100);
    double hd = hyperlink_density(w, 1e-10);
    std::uint64_t k = rng.uniform_int(1, 40);
    EXPECT_GE(hyperlink_density(WordCounts{w.anchor_words + k, w.all_words + k}, 1e-10), hd - 1e-8);
    EXPECT_LE(hyperlink_density(WordCounts{w.anchor_words, w.all_words + k}, 1e-10), hd + 1e-8);
  }
}

TEST(GapProfile, Examples) {
  auto dom = support::indexed_tree_fixture();
  EXPECT_EQ(gap_profile(dom).dl, (std::vector<std::uint32_t>{4, 2, 0}));
  std::vector<std::uint32_t> one{9}, run{2, 3, 4};
  EXPECT_EQ(gap_profile(one).dl, (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(gap_profile(run).dl, (std::vector<std::uint32_t>{1, 1, 0}));
  EXPECT_EQ(gap_profile(parse_page("<p>none</p>")).dl, (std::vector<std::uint32_t>{0}));
}

TEST(GapThreshold, Examples) {
  EXPECT_EQ(select_gap_threshold(GapProfile{{10, 4, 3, 1, 0}}, 1.0), 4u);
  EXPECT_EQ(select_gap_threshold(GapProfile{{0}}, 1.0), 0u);
  EXPECT_EQ(select_gap_threshold(GapProfile{{8, 8, 8, 0}}, 1.0), 0u);
}

TEST(GapThreshold, MatchesEnumerationOracle) {
  Rng rng(2024);
  for (int t = 0; t < 400; ++t) {
    std::vector<std::uint32_t> idx;
    std::uint32_t cur = 0;
    const auto n = rng.uniform_int(1, 120);
    const auto spread = rng.uniform_int(1, 60);
    for (std::uint64_t k = 0; k < n; ++k) idx.push_back(cur += static_cast<std::uint32_t>(rng.uniform_int(1, spread)));
    const auto beta_num = static_cast<std::int64_t>(rng.uniform_int(0, 16));
    auto profile = gap_profile(idx);
    std::uint32_t got = select_gap_threshold(profile, static_cast<double>(beta_num) / 4.0);
    EXPECT_EQ(got, support::gap_threshold_by_enumeration(idx, beta_num)) << "trial " << t;
    EXPECT_NE(std::find(profile.dl.begin(), profile.dl.end(), got), profile.dl.end());
  }
}

TEST(GapThreshold, ScaleInvariant) {
  Rng rng(99);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::uint32_t> dl;
    for (std::uint64_t k = rng.uniform_int(1, 60); k > 0; --k) dl.push_back(static_cast<std::uint32_t>(rng.uniform_int(0, 50)));
    dl.push_back(0);
    std::sort(dl.rbegin(), dl.rend());
    const std::uint32_t s = static_cast<std::uint32_t>(rng.uniform_int(2, 7));
    std::vector<std::uint32_t> scaled = dl;
    for (auto& v : scaled) v *= s;
    EXPECT_EQ(select_gap_threshold(GapProfile{scaled}, 1.0), s * select_gap_threshold(GapProfile{dl}, 1.0));
  }
}

TEST(HdThreshold, Examples) {
  auto dom = parse_page("<body><a href=x>" + words(10, "l") + "</a><p>" + words(30) + "</p></body>");
  EXPECT_DOUBLE_EQ(select_hd_threshold(dom, 0.0, 1e-10), 0.0);
  EXPECT_NEAR(select_hd_threshold(dom, 1.0, 1e-10), 0.25, 1e-10);
  auto all_anchor = parse_page("<body><a href=x>a b</a><a href=y>c</a></body>");
  EXPECT_NEAR(select_hd_threshold(all_anchor, 1.0, 1e-10), 1.0, 1e-10);
}

TEST(ClusteringConfig, Validation) {
  ClusteringConfig c;
  EXPECT_NO_THROW(c.validate());
  c.epsilon = 0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = {};
  c.beta = -1;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = {};
  c.gamma = -0.5;
  EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(ResolveThresholds, GtComesFromTheProfile) {
  support::RandomHtml gen(3);
  for (int t = 0; t < 50; ++t) {
    auto dom = parse_page(gen.page());
    auto cfg = resolve_thresholds(dom, ClusteringConfig{});
    auto dl = gap_profile(dom).dl;
    EXPECT_NE(std::find(dl.begin(), dl.end(), cfg.gt), dl.end());
    EXPECT_GE(cfg.hdt, 0.0);
  }
}
