#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "navseg/clustering.hpp"
#include "navseg/errors.hpp"
#include "navseg/features.hpp"
#include "navseg/random.hpp"

using namespace navseg;

namespace {

// Direct convolution with a normalized Gaussian of radius ceil(3 sigma),
// clamping indices at the ends.
std::vector<double> reference_smooth(const std::vector<double>& x, double sigma) {
  const int r = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> w;
  for (int d = -r; d <= r; ++d) w.push_back(std::exp(-d * d / (2 * sigma * sigma)));
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  const int n = static_cast<int>(x.size());
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int d = -r; d <= r; ++d) s += w[static_cast<std::size_t>(d + r)] * x[static_cast<std::size_t>(std::clamp(i + d, 0, n - 1))];
    out[static_cast<std::size_t>(i)] = s / total;
  }
  return out;
}

std::vector<double> random_sequence(Rng& rng) {
  std::vector<double> v(rng.uniform_int(1, 80));
  for (auto& x : v) x = static_cast<double>(rng.uniform_int(0, 12));
  return v;
}

}  // namespace

TEST(Kernel, UnitSumAndRadius) {
  for (double sigma : {0.5, 1.0, 2.0, 3.7}) {
    SmoothingConfig cfg{sigma, 0};
    auto w = gaussian_half_kernel(cfg);
    ASSERT_EQ(static_cast<int>(w.size()), cfg.effective_radius() + 1);
    EXPECT_EQ(cfg.effective_radius(), static_cast<int>(std::ceil(3 * sigma)));
    double total = w[0];
    for (std::size_t d = 1; d < w.size(); ++d) total += 2 * w[d];
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (std::size_t d = 1; d < w.size(); ++d) EXPECT_LT(w[d], w[d - 1]);
  }
  EXPECT_EQ(SmoothingConfig{}.effective_radius(), 6);
}

TEST(Smoothing, Examples) {
  SmoothingConfig cfg{2.0, 6};
  std::vector<double> c{3, 3, 3, 3};
  EXPECT_EQ(smooth_text_lengths(c, cfg), c);
  std::vector<double> one{7};
  EXPECT_EQ(smooth_text_lengths(one, cfg), one);
  std::vector<double> spike{0, 0, 10, 0, 0};
  auto s = smooth_text_lengths(spike, cfg);
  // Clamped taps past the ends repeat zeros, so the centre keeps exactly the
  // central weight of the spike.
  EXPECT_NEAR(s[2], 10 * gaussian_half_kernel(cfg)[0], 1e-12);
  EXPECT_GT(s[2], 10.0 / 13);
  EXPECT_LT(s[2], 10.0);
  EXPECT_GT(s[1], s[0]);
  EXPECT_GT(s[2], s[1]);
  EXPECT_EQ(s[0], s[4]);
  EXPECT_EQ(s[1], s[3]);
  EXPECT_TRUE(smooth_text_lengths(std::vector<double>{}, cfg).empty());
}

TEST(Smoothing, MatchesDirectConvolution) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    auto x = random_sequence(rng);
    auto got = smooth_text_lengths(x, SmoothingConfig{2.0, 0});
    auto want = reference_smooth(x, 2.0);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(Smoothing, AveragingProperties) {
  Rng rng(6);
  for (int t = 0; t < 300; ++t) {
    auto x = random_sequence(rng);
    auto s = smooth_text_lengths(x, SmoothingConfig{});
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    for (double v : s) {
      EXPECT_GE(v, *lo - 1e-12);
      EXPECT_LE(v, *hi + 1e-12);
    }
    std::vector<double> rev(x.rbegin(), x.rend());
    auto sr = smooth_text_lengths(rev, SmoothingConfig{});
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(sr[i], s[s.size() - 1 - i]);
  }
}

TEST(BlockFeatures, ConstantBlockAndSingleton) {
  std::string html = "<body><ul>";
  for (int i = 0; i < 5; ++i) html += "<li><a href=/" + std::to_string(i) + ">two words</a></li>";
  html += "</ul></body>";
  auto dom = parse_page(html);
  BlockPartition p;
  for (const auto& h : dom.hyperlinks()) p.blocks.push_back({h.index});
  BlockPartition whole;
  whole.blocks.push_back(p.elements());
  auto f = block_features(dom, whole, SmoothingConfig{});
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].count, 5u);
  EXPECT_DOUBLE_EQ(f[0].text_mean, 2.0);
  EXPECT_DOUBLE_EQ(f[0].text_var, 0.0);
  auto singles = block_features(dom, p, SmoothingConfig{});
  for (const auto& s : singles) {
    EXPECT_EQ(s.count, 1u);
    EXPECT_EQ(s.text_var, 0.0);
  }
}

TEST(BlockFeatures, PageScopeSmoothingThenPopulationStatistics) {
  auto dom = parse_page(
      "<body><div><a href=1>a</a><a href=2>a b c d e f</a><a href=3>a b</a></div>"
      "<p>filler text</p><div><a href=4>x y z</a><a href=5><img></a></div></body>");
  std::vector<double> lengths;
  for (const auto& h : dom.hyperlinks()) lengths.push_back(h.anchor_words);
  ASSERT_EQ(lengths, (std::vector<double>{1, 6, 2, 3, 0}));
  auto sm = reference_smooth(lengths, 2.0);
  BlockPartition p;
  auto links = dom.hyperlinks();
  p.blocks = {{links[0].index, links[1].index, links[2].index}, {links[3].index, links[4].index}};
  auto f = block_features(dom, p, SmoothingConfig{});
  ASSERT_EQ(f.size(), 2u);
  auto stats = [&](std::size_t lo, std::size_t hi) {
    double m = 0, v = 0;
    for (std::size_t i = lo; i < hi; ++i) m += sm[i];
    m /= static_cast<double>(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) v += (sm[i] - m) * (sm[i] - m);
    return std::pair{m, v / static_cast<double>(hi - lo)};
  };
  auto [m0, v0] = stats(0, 3);
  auto [m1, v1] = stats(3, 5);
  EXPECT_EQ(f[0].count, 3u);
  EXPECT_NEAR(f[0].text_mean, m0, 1e-12);
  EXPECT_NEAR(f[0].text_var, v0, 1e-12);
  EXPECT_EQ(f[1].count, 2u);
  EXPECT_NEAR(f[1].text_mean, m1, 1e-12);
  EXPECT_NEAR(f[1].text_var, v1, 1e-12);
}

TEST(BlockFeatures, VarianceIsTranslationInvariant) {
  // Adding c words to every anchor shifts every smoothed length by c.
  auto build = [](int extra) {
    std::string html = "<body>";
    const int base[] = {1, 4, 2, 7, 3, 3, 5};
    for (int i = 0; i < 7; ++i) {
      html += "<a href=" + std::to_string(i) + ">";
      for (int w = 0; w < base[i] + extra; ++w) html += "w ";
      html += "</a>";
    }
    return parse_page(html + "</body>");
  };
  auto d0 = build(0), d3 = build(3);
  BlockPartition p;
  p.blocks.resize(2);
  for (std::size_t i = 0; i < d0.hyperlinks().size(); ++i) p.blocks[i < 4 ? 0 : 1].push_back(d0.hyperlinks()[i].index);
  auto f0 = block_features(d0, p, SmoothingConfig{});
  auto f3 = block_features(d3, p, SmoothingConfig{});
  for (std::size_t b = 0; b < 2; ++b) {
    EXPECT_NEAR(f3[b].text_mean, f0[b].text_mean + 3, 1e-9);
    EXPECT_NEAR(f3[b].text_var, f0[b].text_var, 1e-9);
    EXPECT_EQ(f3[b].count, p.blocks[b].size());
  }
}

TEST(Scaler, FitExamples) {
  std::vector<BlockFeatures> one{{4, 2.5, 1.0}};
  auto s1 = fit_scaler(one);
  EXPECT_EQ(s1.min, s1.max);
  std::vector<BlockFeatures> two{{1, 0, 0}, {9, 4, 2}};
  auto s = fit_scaler(two);
  EXPECT_EQ(s.min, (std::array<double, 3>{1, 0, 0}));
  EXPECT_EQ(s.max, (std::array<double, 3>{9, 4, 2}));
  EXPECT_THROW(fit_scaler(std::vector<BlockFeatures>{}), ContractViolation);
}

TEST(Scaler, ApplyExamples) {
  std::vector<BlockFeatures> two{{1, 0, 0}, {9, 4, 2}};
  auto s = fit_scaler(two);
  EXPECT_EQ(apply_scaler(s, two[0]), (std::array<double, 3>{0, 0, 0}));
  EXPECT_EQ(apply_scaler(s, two[1]), (std::array<double, 3>{1, 1, 1}));
  auto out = apply_scaler(s, BlockFeatures{17, -2, 1});
  EXPECT_DOUBLE_EQ(out[0], 2.0);
  EXPECT_DOUBLE_EQ(out[1], -0.5);
  EXPECT_DOUBLE_EQ(out[2], 0.5);
  std::vector<BlockFeatures> flat{{3, 1, 0}, {3, 2, 0}};
  auto degenerate = apply_scaler(fit_scaler(flat), BlockFeatures{3, 1.5, 0});
  EXPECT_EQ(degenerate[0], 0.5);
  EXPECT_EQ(degenerate[2], 0.5);
}

TEST(Scaler, OwnFitMapsIntoUnitCube) {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    std::vector<BlockFeatures> fs(rng.uniform_int(1, 30));
    for (auto& f : fs) f = {static_cast<std::uint32_t>(rng.uniform_int(1, 20)), rng.uniform01() * 10, rng.uniform01() * 5};
    auto s = fit_scaler(fs);
    for (int k = 0; k < 3; ++k) EXPECT_GE(s.max[k], s.min[k]);
    for (const auto& f : fs)
      for (double v : apply_scaler(s, f)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
  }
}
