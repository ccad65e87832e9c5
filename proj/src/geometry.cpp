#include "navseg/geometry.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "navseg/errors.hpp"

namespace navseg {

void ClusteringConfig::validate() const {
  if (!(epsilon > 0.0)) throw ContractViolation("epsilon must be positive");
  if (!(beta >= 0.0)) throw ContractViolation("beta must be non-negative");
  if (!(gamma >= 0.0)) throw ContractViolation("gamma must be non-negative");
}

std::uint32_t dom_distance(const HyperlinkRef& a, const HyperlinkRef& b) {
  return a.index > b.index ? a.index - b.index : b.index - a.index;
}

std::uint32_t block_gap(std::span<const std::uint32_t> b1, std::span<const std::uint32_t> b2) {
  if (b1.empty() || b2.empty()) throw ContractViolation("block_gap needs two non-empty blocks");
  std::vector<std::uint32_t> a(b1.begin(), b1.end());
  std::vector<std::uint32_t> b(b2.begin(), b2.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // Merge walk: the closest cross pair is adjacent in the merged order.
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) throw ContractViolation("blocks share hyperlink " + std::to_string(a[i]));
    if (a[i] < b[j]) {
      best = std::min(best, b[j] - a[i]);
      ++i;
    } else {
      best = std::min(best, a[i] - b[j]);
      ++j;
    }
  }
  return best;
}

std::uint32_t block_gap(std::span<const HyperlinkRef> b1, std::span<const HyperlinkRef> b2) {
  std::vector<std::uint32_t> a, b;
  for (const auto& h : b1) a.push_back(h.index);
  for (const auto& h : b2) b.push_back(h.index);
  return block_gap(a, b);
}

double hyperlink_density(const WordCounts& counts, double epsilon) {
  return (static_cast<double>(counts.anchor_words) + epsilon) /
         (static_cast<double>(counts.all_words) + epsilon);
}

double hyperlink_density(const IndexedDom& dom, std::span<const NodeId> roots, double epsilon) {
  return hyperlink_density(subtree_word_counts(dom, roots), epsilon);
}

GapProfile gap_profile(std::span<const std::uint32_t> sorted_link_indices) {
  GapProfile p;
  for (std::size_t i = 1; i < sorted_link_indices.size(); ++i)
    p.dl.push_back(sorted_link_indices[i] - sorted_link_indices[i - 1]);
  p.dl.push_back(0);
  std::sort(p.dl.begin(), p.dl.end(), std::greater<>());
  return p;
}

GapProfile gap_profile(const IndexedDom& dom) {
  std::vector<std::uint32_t> indices;
  for (const auto& h : dom.hyperlinks()) indices.push_back(h.index);
  return gap_profile(indices);
}

std::uint32_t select_gap_threshold(const GapProfile& profile, double beta) {
  const auto& dl = profile.dl;
  if (dl.empty() || dl.front() == 0) return 0;
  // Scores are compared after multiplying through by DL_1 * |DL| > 0, which
  // keeps the distance term an exact integer and the argmin unchanged.
  const double n = static_cast<double>(dl.size());
  const double top = static_cast<double>(dl.front());
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dl.size(); ++i) {
    double score = static_cast<double>(dl[i]) * n + beta * static_cast<double>(i + 1) * top;
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return dl[best];
}

double select_hd_threshold(const IndexedDom& dom, double gamma, double epsilon) {
  if (gamma == 0.0) return 0.0;
  const NodeId root = dom.density_root();
  return gamma * hyperlink_density(dom, std::span<const NodeId>(&root, 1), epsilon);
}

ClusteringConfig resolve_thresholds(const IndexedDom& dom, ClusteringConfig config) {
  config.validate();
  config.gt = select_gap_threshold(gap_profile(dom), config.beta);
  config.hdt = select_hd_threshold(dom, config.gamma, config.epsilon);
  return config;
}

}  // namespace navseg
