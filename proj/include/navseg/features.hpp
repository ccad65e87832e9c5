#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "navseg/clustering.hpp"
#include "navseg/dom.hpp"

namespace navseg {

/// [#B, mean, variance] of the smoothed anchor-text lengths of a block.
struct BlockFeatures {
  std::uint32_t count = 0;
  double text_mean = 0.0;
  double text_var = 0.0;

  std::array<double, 3> as_array() const {
    return {static_cast<double>(count), text_mean, text_var};
  }
  bool operator==(const BlockFeatures&) const = default;
};

struct SmoothingConfig {
  double sigma = 2.0;
  int radius = 0;  // 0 means ceil(3 * sigma)

  int effective_radius() const;
};

/// Half of a symmetric, unit-sum discrete Gaussian: weights[d] for d = 0..r,
/// with w(-d) = w(d).
std::vector<double> gaussian_half_kernel(const SmoothingConfig& cfg);

/// Discrete Gaussian convolution with index clamping at both ends.
std::vector<double> smooth_text_lengths(std::span<const double> lengths, const SmoothingConfig& cfg);

/// Features for every block of `partition`, in partition order. Anchor word
/// counts are smoothed once over the whole page in DFS order.
std::vector<BlockFeatures> block_features(const IndexedDom& dom, const BlockPartition& partition,
                                          const SmoothingConfig& cfg);

/// Per-feature min/max learned from training blocks.
struct FeatureScaler {
  std::array<double, 3> min{};
  std::array<double, 3> max{};

  bool operator==(const FeatureScaler&) const = default;
};

/// Throws ContractViolation on an empty list.
FeatureScaler fit_scaler(std::span<const BlockFeatures> features);

/// (x - min) / (max - min) per component, 0.5 for a degenerate range. Values
/// outside the training range are not clipped.
std::array<double, 3> apply_scaler(const FeatureScaler& scaler, const BlockFeatures& f);

}  // namespace navseg
