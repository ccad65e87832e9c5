#include "navseg/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>

#include "navseg/errors.hpp"
#include "navseg/random.hpp"

namespace navseg {
namespace {

std::vector<std::uint32_t> link_indices(const IndexedDom& dom) {
  std::vector<std::uint32_t> out;
  out.reserve(dom.hyperlinks().size());
  for (const auto& h : dom.hyperlinks()) out.push_back(h.index);
  return out;
}

std::vector<std::uint32_t> sorted_copy(std::span<const std::uint32_t> indices) {
  std::vector<std::uint32_t> v(indices.begin(), indices.end());
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw ContractViolation("duplicate hyperlink index");
  return v;
}

BlockPartition from_labels(std::span<const std::uint32_t> points, std::span<const std::size_t> label) {
  std::size_t groups = 0;
  for (std::size_t l : label) groups = std::max(groups, l + 1);
  BlockPartition p;
  p.blocks.resize(groups);
  for (std::size_t i = 0; i < points.size(); ++i) p.blocks[label[i]].push_back(points[i]);
  std::erase_if(p.blocks, [](const Block& b) { return b.empty(); });
  p.canonicalize();
  return p;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

BlockPartition& BlockPartition::canonicalize() {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    if (a.empty() || b.empty()) return a.size() < b.size();
    return a.front() < b.front();
  });
  return *this;
}

bool BlockPartition::same_partition(const BlockPartition& other) const {
  BlockPartition a = *this, b = other;
  return a.canonicalize().blocks == b.canonicalize().blocks;
}

std::size_t BlockPartition::element_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.size();
  return n;
}

std::vector<std::uint32_t> BlockPartition::elements() const {
  std::vector<std::uint32_t> out;
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

void validate_partition(const BlockPartition& partition, std::span<const std::uint32_t> universe) {
  for (const auto& b : partition.blocks)
    if (b.empty()) throw ContractViolation("partition contains an empty block");
  std::vector<std::uint32_t> got = partition.elements();
  if (std::adjacent_find(got.begin(), got.end()) != got.end())
    throw ContractViolation("partition blocks overlap");
  std::vector<std::uint32_t> want(universe.begin(), universe.end());
  std::sort(want.begin(), want.end());
  if (got != want) throw ContractViolation("partition does not cover the hyperlink set exactly");
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "chd") return Algorithm::kChd;
  if (name == "chd-hd") return Algorithm::kChdHd;
  if (name == "agglo") return Algorithm::kAgglomerative;
  if (name == "dbscan") return Algorithm::kDbscan;
  if (name == "kmeans") return Algorithm::kKMeans;
  throw ContractViolation("unknown clustering algorithm '" + std::string(name) + "'");
}

std::string_view algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::kChd: return "chd";
    case Algorithm::kChdHd: return "chd-hd";
    case Algorithm::kAgglomerative: return "agglo";
    case Algorithm::kDbscan: return "dbscan";
    case Algorithm::kKMeans: return "kmeans";
  }
  return "?";
}

BlockPartition cluster_chd(const IndexedDom& dom, const ClusteringConfig& config) {
  BlockPartition out;
  const auto links = dom.hyperlinks();
  if (links.empty()) return out;

  // Whether each node's hyperlinks still form one cluster ("TRUE" in the
  // recursion). Nodes are visited in decreasing index order, so every child
  // is decided before its parent.
  std::vector<char> is_one(dom.size() + 1, 1);
  auto commit = [&](Block& cluster) {
    if (!cluster.empty()) out.blocks.push_back(std::move(cluster));
    cluster.clear();
  };

  for (std::uint32_t id = static_cast<std::uint32_t>(dom.size()); id >= 1; --id) {
    const DomNode& n = dom.node(NodeId{id});
    if (n.children.empty() || dom.hyperlinks_in(NodeId{id}).empty()) continue;

    Block cluster;
    bool one = true;
    std::optional<NodeId> previous;        // last hyperlink-bearing child merged
    std::optional<std::uint32_t> tc_first;  // first child of the density window
    for (NodeId child : n.children) {
      const DomNode& c = dom.node(child);
      if (!tc_first) tc_first = child.value;
      auto child_links = dom.hyperlinks_in(child);
      if (child_links.empty()) continue;
      if (!is_one[child.value]) {
        commit(cluster);
        one = false;
        tc_first.reset();
        continue;
      }
      if (!cluster.empty()) {
        std::uint32_t gap = child_links.front().index - dom.hyperlinks_in(*previous).back().index;
        double hd = hyperlink_density(dom.range_word_counts(*tc_first, c.subtree_end), config.epsilon);
        if (gap > config.gt || hd < config.hdt) {
          commit(cluster);
          one = false;
          tc_first = child.value;
        }
      }
      previous = child;
      for (const auto& h : child_links) cluster.push_back(h.index);
    }
    if (!one) {
      commit(cluster);
      // A (nested) anchor whose descendants split still needs a block.
      if (n.is_element("a")) out.blocks.push_back(Block{n.index});
    }
    is_one[id] = one ? 1 : 0;
  }

  if (is_one[dom.root().value]) {
    out.blocks.clear();
    out.blocks.push_back(link_indices(dom));
  }
  out.canonicalize();
  return out;
}

BlockPartition cluster_agglomerative(std::span<const std::uint32_t> indices, std::uint32_t gt) {
  std::vector<std::uint32_t> pts = sorted_copy(indices);
  const std::size_t n = pts.size();
  if (n == 0) return {};
  auto dist = [&](std::size_t a, std::size_t b) {
    return pts[a] > pts[b] ? pts[a] - pts[b] : pts[b] - pts[a];
  };
  // The single-linkage merge sequence is the minimum spanning tree taken in
  // increasing edge order (Prim, O(n^2)).
  struct Edge {
    std::uint32_t weight;
    std::size_t a, b;
  };
  std::vector<Edge> mst;
  std::vector<char> in_tree(n, 0);
  std::vector<std::uint32_t> best(n, std::numeric_limits<std::uint32_t>::max());
  std::vector<std::size_t> from(n, 0);
  std::size_t cur = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      std::uint32_t d = dist(cur, v);
      if (d < best[v]) {
        best[v] = d;
        from[v] = cur;
      }
      if (next == n || best[v] < best[next]) next = v;
    }
    in_tree[next] = 1;
    mst.push_back({best[next], from[next], next});
    cur = next;
  }
  std::stable_sort(mst.begin(), mst.end(), [](const Edge& x, const Edge& y) { return x.weight < y.weight; });
  DisjointSets sets(n);
  for (const Edge& e : mst) {
    if (e.weight > gt) break;  // closest clusters are now farther than gt
    sets.unite(e.a, e.b);
  }
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = sets.find(i);
  return from_labels(pts, label);
}

BlockPartition cluster_agglomerative(const IndexedDom& dom, std::uint32_t gt) {
  return cluster_agglomerative(link_indices(dom), gt);
}

BlockPartition cluster_density(std::span<const std::uint32_t> indices, std::uint32_t gt) {
  std::vector<std::uint32_t> pts = sorted_copy(indices);
  const std::size_t n = pts.size();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(n, kUnvisited);
  auto region = [&](std::size_t p) {
    std::uint64_t lo = pts[p] >= gt ? pts[p] - gt : 0;
    std::uint64_t hi = static_cast<std::uint64_t>(pts[p]) + gt;
    auto first = std::lower_bound(pts.begin(), pts.end(), lo);
    auto last = std::upper_bound(pts.begin(), pts.end(), hi);
    return std::pair<std::size_t, std::size_t>(first - pts.begin(), last - pts.begin());
  };
  std::size_t next_label = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != kUnvisited) continue;
    // min_samples = 1: every point is a core point, so the cluster is the
    // eps-connected component of p.
    std::size_t c = next_label++;
    label[p] = c;
    std::queue<std::size_t> frontier;
    frontier.push(p);
    while (!frontier.empty()) {
      std::size_t q = frontier.front();
      frontier.pop();
      auto [first, last] = region(q);
      for (std::size_t r = first; r < last; ++r) {
        if (label[r] != kUnvisited) continue;
        label[r] = c;
        frontier.push(r);
      }
    }
  }
  return from_labels(pts, label);
}

BlockPartition cluster_density(const IndexedDom& dom, std::uint32_t gt) {
  return cluster_density(link_indices(dom), gt);
}

BlockPartition cluster_kmeans(std::span<const std::uint32_t> indices, std::size_t k,
                              std::uint64_t seed) {
  std::vector<std::uint32_t> pts = sorted_copy(indices);
  const std::size_t n = pts.size();
  if (k == 0 || k > n)
    throw ContractViolation("k-means needs 1 <= k <= " + std::to_string(n) + ", got " + std::to_string(k));
  constexpr int kRestarts = 10;
  constexpr int kMaxIterations = 300;
  Rng rng(seed);
  std::vector<double> x(pts.begin(), pts.end());

  std::vector<std::size_t> best_label;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < kRestarts; ++restart) {
    std::vector<double> centers;
    centers.push_back(x[rng.uniform_int(0, n - 1)]);
    std::vector<double> d2(n);
    while (centers.size() < k) {
      double total = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (double c : centers) m = std::min(m, (x[i] - c) * (x[i] - c));
        d2[i] = m;
        total += m;
      }
      std::size_t pick = 0;
      if (total > 0) {
        double r = rng.uniform01() * total;
        double acc = 0;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          acc += d2[i];
          if (d2[i] > 0 && r < acc) {
            pick = i;
            break;
          }
        }
        while (d2[pick] == 0 && pick > 0) --pick;
      } else {
        while (pick < n && d2[pick] == 0) ++pick;
      }
      centers.push_back(x[pick]);
    }

    std::vector<std::size_t> label(n, k);
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t arg = 0;
        for (std::size_t c = 1; c < k; ++c)
          if (std::abs(x[i] - centers[c]) < std::abs(x[i] - centers[arg])) arg = c;
        if (label[i] != arg) {
          label[i] = arg;
          changed = true;
        }
      }
      if (!changed) break;
      std::vector<double> sum(k, 0.0);
      std::vector<std::size_t> count(k, 0);
      for (std::size_t i = 0; i < n; ++i) {
        sum[label[i]] += x[i];
        ++count[label[i]];
      }
      for (std::size_t c = 0; c < k; ++c)
        if (count[c] > 0) centers[c] = sum[c] / static_cast<double>(count[c]);
    }
    double inertia = 0;
    for (std::size_t i = 0; i < n; ++i) inertia += (x[i] - centers[label[i]]) * (x[i] - centers[label[i]]);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_label = label;
    }
  }
  return from_labels(pts, best_label);
}

BlockPartition cluster_kmeans(const IndexedDom& dom, std::size_t k, std::uint64_t seed) {
  return cluster_kmeans(link_indices(dom), k, seed);
}

}  // namespace navseg
