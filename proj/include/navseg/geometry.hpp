#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "navseg/dom.hpp"

namespace navseg {

/// Distances between neighbouring hyperlinks plus one trailing 0, sorted
/// non-increasing.
struct GapProfile {
  std::vector<std::uint32_t> dl;
};

struct ClusteringConfig {
  double epsilon = 1e-10;  // density smoothing
  double beta = 1.0;       // gap-threshold tradeoff
  double gamma = 1.0;      // density-threshold scale; 0 disables the density test
  std::uint32_t gt = 0;    // resolved gap threshold
  double hdt = 0.0;        // resolved hyperlink-density threshold

  /// Throws ContractViolation unless epsilon > 0, beta >= 0, gamma >= 0.
  void validate() const;
};

/// |index(a) - index(b)|.
std::uint32_t dom_distance(const HyperlinkRef& a, const HyperlinkRef& b);

/// Minimum DOM distance over cross pairs. Both sets must be non-empty and
/// disjoint (ContractViolation otherwise).
std::uint32_t block_gap(std::span<const std::uint32_t> b1, std::span<const std::uint32_t> b2);
std::uint32_t block_gap(std::span<const HyperlinkRef> b1, std::span<const HyperlinkRef> b2);

/// (anchor words + epsilon) / (all words + epsilon) over disjoint subtrees.
double hyperlink_density(const IndexedDom& dom, std::span<const NodeId> roots, double epsilon);
double hyperlink_density(const WordCounts& counts, double epsilon);

GapProfile gap_profile(const IndexedDom& dom);
GapProfile gap_profile(std::span<const std::uint32_t> sorted_link_indices);

/// The DL value minimizing DL_i / DL_1 + beta * i / |DL| over 1-based
/// positions i; ties go to the smallest i. Degenerate profiles (DL_1 = 0)
/// yield 0.
std::uint32_t select_gap_threshold(const GapProfile& profile, double beta);

/// gamma times the hyperlink density of the whole <body>.
double select_hd_threshold(const IndexedDom& dom, double gamma, double epsilon);

/// Copy of `config` with gt and hdt filled in for this page.
ClusteringConfig resolve_thresholds(const IndexedDom& dom, ClusteringConfig config);

}  // namespace navseg
