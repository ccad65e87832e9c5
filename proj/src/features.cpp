#include "navseg/features.hpp"

#include <algorithm>
#include <cmath>

#include "navseg/errors.hpp"

namespace navseg {

int SmoothingConfig::effective_radius() const {
  if (!(sigma > 0.0)) throw ContractViolation("smoothing sigma must be positive");
  if (radius > 0) return radius;
  return static_cast<int>(std::ceil(3.0 * sigma));
}

std::vector<double> gaussian_half_kernel(const SmoothingConfig& cfg) {
  const int r = cfg.effective_radius();
  std::vector<double> w(static_cast<std::size_t>(r) + 1);
  for (int d = 0; d <= r; ++d) w[static_cast<std::size_t>(d)] = std::exp(-(d * d) / (2.0 * cfg.sigma * cfg.sigma));
  double total = w[0];
  for (int d = 1; d <= r; ++d) total += 2.0 * w[static_cast<std::size_t>(d)];
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> smooth_text_lengths(std::span<const double> lengths, const SmoothingConfig& cfg) {
  const std::vector<double> w = gaussian_half_kernel(cfg);
  const int r = static_cast<int>(w.size()) - 1;
  const auto n = static_cast<std::ptrdiff_t>(lengths.size());
  std::vector<double> out(lengths.size());
  auto at = [&](std::ptrdiff_t i) { return lengths[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1))]; };
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    // Accumulating deviations from the centre value is algebraically the
    // plain weighted sum (the weights sum to 1) and reproduces constant runs
    // exactly.
    const double centre = lengths[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (int d = 1; d <= r; ++d)
      acc += w[static_cast<std::size_t>(d)] * ((at(i - d) - centre) + (at(i + d) - centre));
    out[static_cast<std::size_t>(i)] = centre + acc;
  }
  return out;
}

std::vector<BlockFeatures> block_features(const IndexedDom& dom, const BlockPartition& partition,
                                          const SmoothingConfig& cfg) {
  const auto links = dom.hyperlinks();
  std::vector<double> lengths;
  lengths.reserve(links.size());
  for (const auto& h : links) lengths.push_back(static_cast<double>(h.anchor_words));
  const std::vector<double> smoothed = smooth_text_lengths(lengths, cfg);

  auto position = [&](std::uint32_t index) {
    auto it = std::lower_bound(links.begin(), links.end(), index,
                               [](const HyperlinkRef& h, std::uint32_t v) { return h.index < v; });
    if (it == links.end() || it->index != index)
      throw ContractViolation("block refers to non-hyperlink node " + std::to_string(index));
    return static_cast<std::size_t>(it - links.begin());
  };

  std::vector<BlockFeatures> out;
  out.reserve(partition.blocks.size());
  for (const auto& block : partition.blocks) {
    if (block.empty()) throw ContractViolation("empty block");
    BlockFeatures f;
    f.count = static_cast<std::uint32_t>(block.size());
    double sum = 0;
    for (auto idx : block) sum += smoothed[position(idx)];
    f.text_mean = sum / static_cast<double>(block.size());
    double sq = 0;
    for (auto idx : block) {
      double d = smoothed[position(idx)] - f.text_mean;
      sq += d * d;
    }
    f.text_var = sq / static_cast<double>(block.size());
    out.push_back(f);
  }
  return out;
}

FeatureScaler fit_scaler(std::span<const BlockFeatures> features) {
  if (features.empty()) throw ContractViolation("cannot fit a scaler on zero blocks");
  FeatureScaler s;
  s.min = s.max = features.front().as_array();
  for (const auto& f : features) {
    auto v = f.as_array();
    for (std::size_t k = 0; k < 3; ++k) {
      s.min[k] = std::min(s.min[k], v[k]);
      s.max[k] = std::max(s.max[k], v[k]);
    }
  }
  return s;
}

std::array<double, 3> apply_scaler(const FeatureScaler& scaler, const BlockFeatures& f) {
  auto v = f.as_array();
  std::array<double, 3> out{};
  for (std::size_t k = 0; k < 3; ++k) {
    double range = scaler.max[k] - scaler.min[k];
    out[k] = range > 0 ? (v[k] - scaler.min[k]) / range : 0.5;
  }
  return out;
}

}  // namespace navseg
