#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "navseg/dom.hpp"
#include "navseg/geometry.hpp"

namespace navseg {

using Block = std::vector<std::uint32_t>;  // hyperlink DFS indices

/// Assignment of every hyperlink on a page to exactly one block.
struct BlockPartition {
  std::string page_id;
  std::vector<Block> blocks;

  /// Sorts indices within blocks and blocks by their first index.
  BlockPartition& canonicalize();
  /// Canonical copies compare equal iff the partitions are equal.
  bool same_partition(const BlockPartition& other) const;
  std::size_t element_count() const;
  /// All indices, ascending.
  std::vector<std::uint32_t> elements() const;
};

/// Throws ContractViolation unless blocks are non-empty, disjoint and cover
/// exactly `universe`.
void validate_partition(const BlockPartition& partition, std::span<const std::uint32_t> universe);

enum class Algorithm { kChd, kChdHd, kAgglomerative, kDbscan, kKMeans };

/// Parses "chd", "chd-hd", "agglo", "dbscan", "kmeans".
Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm algo);

/// Bottom-up, left-to-right merging of sibling hyperlink groups on the DOM
/// tree. Uses config.gt and config.hdt as resolved by resolve_thresholds.
BlockPartition cluster_chd(const IndexedDom& dom, const ClusteringConfig& config);

/// Single-linkage agglomeration over DOM distances; stops once the closest
/// pair of clusters is farther apart than gt.
BlockPartition cluster_agglomerative(const IndexedDom& dom, std::uint32_t gt);
BlockPartition cluster_agglomerative(std::span<const std::uint32_t> indices, std::uint32_t gt);

/// DBSCAN with eps = gt and min_samples = 1.
BlockPartition cluster_density(const IndexedDom& dom, std::uint32_t gt);
BlockPartition cluster_density(std::span<const std::uint32_t> indices, std::uint32_t gt);

/// 1-D k-means on DFS indices: k-means++ seeding, 10 restarts, best inertia.
/// Throws ContractViolation if k is 0 or exceeds the hyperlink count.
BlockPartition cluster_kmeans(const IndexedDom& dom, std::size_t k, std::uint64_t seed);
BlockPartition cluster_kmeans(std::span<const std::uint32_t> indices, std::size_t k,
                              std::uint64_t seed);

}  // namespace navseg
