#include <gtest/gtest.h>

#include <algorithm>

#include "navseg/clustering.hpp"
#include "navseg/errors.hpp"
#include "navseg/geometry.hpp"
#include "navseg/random.hpp"
#include "support/fixtures.hpp"

using namespace navseg;

namespace {

BlockPartition blocks(std::vector<Block> b) {
  BlockPartition p;
  p.blocks = std::move(b);
  return p.canonicalize();
}

std::vector<std::uint32_t> link_indices(const IndexedDom& dom) {
  std::vector<std::uint32_t> v;
  for (const auto& h : dom.hyperlinks()) v.push_back(h.index);
  return v;
}

// True when every block of `fine` sits inside one block of `coarse`.
bool refines(const BlockPartition& fine, const BlockPartition& coarse) {
  for (const auto& f : fine.blocks) {
    auto home = std::find_if(coarse.blocks.begin(), coarse.blocks.end(), [&](const Block& c) {
      return std::find(c.begin(), c.end(), f.front()) != c.end();
    });
    if (home == coarse.blocks.end()) return false;
    for (auto i : f)
      if (std::find(home->begin(), home->end(), i) == home->end()) return false;
  }
  return true;
}

std::string link_list(int n, const char* cls) {
  std::string s = std::string("<ul class=") + cls + ">";
  for (int i = 0; i < n; ++i) s += "<li><a href=/" + std::string(cls) + std::to_string(i) + ">item</a></li>";
  return s + "</ul>";
}

}  // namespace

TEST(Partition, CanonicalFormAndValidation) {
  auto p = blocks({{12}, {8, 6}});
  EXPECT_EQ(p.blocks, (std::vector<Block>{{6, 8}, {12}}));
  EXPECT_TRUE(p.same_partition(blocks({{12}, {6, 8}})));
  EXPECT_FALSE(p.same_partition(blocks({{6}, {8, 12}})));
  std::vector<std::uint32_t> u{6, 8, 12};
  EXPECT_NO_THROW(validate_partition(p, u));
  EXPECT_THROW(validate_partition(blocks({{6, 8}, {8, 12}}), u), ContractViolation);
  EXPECT_THROW(validate_partition(blocks({{6, 8}}), u), ContractViolation);
  BlockPartition with_empty;
  with_empty.blocks = {{6, 8, 12}, {}};
  EXPECT_THROW(validate_partition(with_empty, u), ContractViolation);
}

TEST(Algorithm, NamesRoundTrip) {
  for (auto a : {Algorithm::kChd, Algorithm::kChdHd, Algorithm::kAgglomerative, Algorithm::kDbscan,
                 Algorithm::kKMeans})
    EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
  EXPECT_THROW(parse_algorithm("spectral"), ContractViolation);
}

TEST(Chd, FixtureTreeSplitsOnGap) {
  auto dom = support::indexed_tree_fixture();
  ClusteringConfig cfg;
  cfg.gt = 2;
  cfg.hdt = 0;
  EXPECT_EQ(cluster_chd(dom, cfg).blocks, (std::vector<Block>{{6, 8}, {12}}));
  cfg.gt = 4;
  EXPECT_EQ(cluster_chd(dom, cfg).blocks, (std::vector<Block>{{6, 8, 12}}));
}

TEST(Chd, AdjacentSiblingsFormOneBlock) {
  auto dom = parse_page("<body>" + link_list(7, "m") + "</body>");
  ClusteringConfig cfg;
  cfg.gamma = 0;
  cfg = resolve_thresholds(dom, cfg);
  cfg.gt = gap_profile(dom).dl.front();
  auto p = cluster_chd(dom, cfg);
  ASSERT_EQ(p.blocks.size(), 1u);
  EXPECT_EQ(p.blocks[0], link_indices(dom));
}

TEST(Chd, DensityTestSplitsListsAroundAnArticle) {
  std::string article = "<div class=article><p>";
  for (int i = 0; i < 200; ++i) article += "text ";
  article += "</p></div>";
  auto dom = parse_page("<body>" + link_list(20, "top") + "<div class=main>" + link_list(5, "a") + article +
                        link_list(5, "b") + "</div></body>");
  ClusteringConfig cfg;
  cfg.gamma = 1;
  cfg = resolve_thresholds(dom, cfg);
  cfg.gt = 1000;  // the gap test never fires

  auto links = link_indices(dom);
  std::span<const std::uint32_t> all(links);
  auto p = cluster_chd(dom, cfg);
  EXPECT_EQ(p.blocks, (std::vector<Block>{{all.begin(), all.begin() + 20},
                                          {all.begin() + 20, all.begin() + 25},
                                          {all.begin() + 25, all.end()}}));

  // The merged span of the two lists is below the page density, each list alone is not.
  auto main_div = dom.node(NodeId{links[20]}).parent;  // li
  main_div = dom.node(NodeId{main_div}).parent;        // ul
  main_div = dom.node(NodeId{main_div}).parent;        // div.main
  const auto& m = dom.node(NodeId{main_div});
  EXPECT_LT(hyperlink_density(dom.range_word_counts(m.index + 1, m.subtree_end), cfg.epsilon), cfg.hdt);
  NodeId first_list = m.children.front();
  EXPECT_NEAR(hyperlink_density(dom, std::span(&first_list, 1), cfg.epsilon), 1.0, 1e-9);

  cfg.gamma = 0;
  cfg.hdt = 0;
  EXPECT_EQ(cluster_chd(dom, cfg).blocks.size(), 1u);
}

TEST(Chd, NoHyperlinksNoBlocks) {
  auto dom = parse_page("<p>nothing to see</p>");
  EXPECT_TRUE(cluster_chd(dom, resolve_thresholds(dom, {})).blocks.empty());
}

TEST(Agglomerative, Examples) {
  std::vector<std::uint32_t> fig{6, 8, 12}, chain{1, 2, 3, 10, 11};
  EXPECT_EQ(cluster_agglomerative(fig, 2).blocks, (std::vector<Block>{{6, 8}, {12}}));
  EXPECT_EQ(cluster_agglomerative(fig, 0).blocks, (std::vector<Block>{{6}, {8}, {12}}));
  EXPECT_EQ(cluster_agglomerative(chain, 1).blocks, (std::vector<Block>{{1, 2, 3}, {10, 11}}));
  std::vector<std::uint32_t> none;
  EXPECT_TRUE(cluster_agglomerative(none, 3).blocks.empty());
}

TEST(Density, SameExamplesAsAgglomerative) {
  std::vector<std::uint32_t> fig{6, 8, 12}, chain{1, 2, 3, 10, 11};
  EXPECT_EQ(cluster_density(fig, 2).blocks, (std::vector<Block>{{6, 8}, {12}}));
  EXPECT_EQ(cluster_density(fig, 0).blocks, (std::vector<Block>{{6}, {8}, {12}}));
  EXPECT_EQ(cluster_density(chain, 1).blocks, (std::vector<Block>{{1, 2, 3}, {10, 11}}));
}

TEST(KMeans, Examples) {
  std::vector<std::uint32_t> pts{1, 2, 3, 100, 101, 102};
  EXPECT_EQ(cluster_kmeans(pts, 1, 7).blocks, (std::vector<Block>{pts}));
  EXPECT_EQ(cluster_kmeans(pts, 2, 7).blocks, (std::vector<Block>{{1, 2, 3}, {100, 101, 102}}));
  EXPECT_EQ(cluster_kmeans(pts, 6, 7).blocks.size(), 6u);
  EXPECT_THROW(cluster_kmeans(pts, 0, 7), ContractViolation);
  EXPECT_THROW(cluster_kmeans(pts, 7, 7), ContractViolation);
}

TEST(KMeans, ResultIsALloydFixedPoint) {
  // Every point is at least as close to its own centroid as to any other,
  // and clusters are contiguous in one dimension.
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::uint32_t> pts;
    std::uint32_t cur = 0;
    for (std::uint64_t k = rng.uniform_int(2, 25); k > 0; --k) pts.push_back(cur += static_cast<std::uint32_t>(rng.uniform_int(1, 40)));
    std::size_t k = rng.uniform_int(1, std::min<std::size_t>(5, pts.size()));
    auto p = cluster_kmeans(pts, k, 7);
    ASSERT_EQ(p.blocks.size(), k);
    validate_partition(p, pts);
    std::vector<double> centre;
    for (const auto& b : p.blocks) {
      double m = 0;
      for (auto i : b) m += i;
      centre.push_back(m / static_cast<double>(b.size()));
    }
    for (std::size_t c = 0; c < k; ++c)
      for (auto i : p.blocks[c])
        for (std::size_t o = 0; o < k; ++o)
          EXPECT_LE(std::abs(i - centre[c]), std::abs(i - centre[o]) + 1e-9);
    for (std::size_t c = 1; c < k; ++c) EXPECT_LT(p.blocks[c - 1].back(), p.blocks[c].front());
    EXPECT_EQ(cluster_kmeans(pts, k, 7).blocks, p.blocks);
  }
}

class RandomPageClustering : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomPageClustering, AllClusterersEmitPartitions) {
  support::RandomHtml gen(GetParam());
  for (int t = 0; t < 10; ++t) {
    auto dom = parse_page(gen.page(6, 6));
    auto links = link_indices(dom);
    auto cfg = resolve_thresholds(dom, {});
    validate_partition(cluster_chd(dom, cfg), links);
    validate_partition(cluster_agglomerative(dom, cfg.gt), links);
    validate_partition(cluster_density(dom, cfg.gt), links);
    if (!links.empty()) {
      std::size_t k = 1 + links.size() / 3;
      validate_partition(cluster_kmeans(dom, k, GetParam()), links);
    }
  }
}

TEST_P(RandomPageClustering, ChdBlocksAreContiguousRuns) {
  support::RandomHtml gen(GetParam() + 1000);
  for (int t = 0; t < 10; ++t) {
    auto dom = parse_page(gen.page(6, 6));
    auto links = link_indices(dom);
    auto p = cluster_chd(dom, resolve_thresholds(dom, {}));
    for (const auto& b : p.blocks) {
      auto first = std::lower_bound(links.begin(), links.end(), b.front());
      ASSERT_LE(static_cast<std::size_t>(links.end() - first), links.size());
      EXPECT_TRUE(std::equal(b.begin(), b.end(), first)) << "block is not a run of consecutive hyperlinks";
    }
  }
}

TEST_P(RandomPageClustering, DensityTestOnlyAddsSplits) {
  support::RandomHtml gen(GetParam() + 2000);
  for (int t = 0; t < 10; ++t) {
    auto dom = parse_page(gen.page(6, 6));
    ClusteringConfig with = resolve_thresholds(dom, {});
    ClusteringConfig without = with;
    without.hdt = 0;
    EXPECT_TRUE(refines(cluster_chd(dom, with), cluster_chd(dom, without)));
  }
}

TEST_P(RandomPageClustering, DensityEqualsAgglomerativeForEveryGt) {
  support::RandomHtml gen(GetParam() + 3000);
  for (int t = 0; t < 10; ++t) {
    auto dom = parse_page(gen.page(6, 6));
    for (std::uint32_t gt : gap_profile(dom).dl)
      EXPECT_TRUE(cluster_density(dom, gt).same_partition(cluster_agglomerative(dom, gt)));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomPageClustering, ::testing::Range<std::uint64_t>(1, 21));
