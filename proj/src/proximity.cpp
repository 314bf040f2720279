#include "richpart/proximity.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "richpart/error.hpp"
#include "richpart/random.hpp"

namespace richpart {

std::optional<NodeId> Subgraph::local_id(NodeId parent) const {
  auto it = std::lower_bound(node_map.begin(), node_map.end(), parent);
  if (it == node_map.end() || *it != parent) return std::nullopt;
  return static_cast<NodeId>(it - node_map.begin());
}

namespace {

// Runs `trials` walks on one rng stream, adding distinct visits into counts.
void run_trials(const CombinedGraph& b, NodeId q, double alpha_r, std::uint32_t trials, Rng rng,
                std::vector<std::uint32_t>& counts) {
  // stamp[v] == t marks v as visited in trial t
  std::vector<std::uint32_t> stamp(b.num_nodes(), 0);
  const double keep = 1.0 - alpha_r;
  for (std::uint32_t t = 1; t <= trials; ++t) {
    NodeId at = q;
    stamp[q] = t;
    ++counts[q];
    for (;;) {
      // One draw decides both whether to restart and, rescaled, where to go.
      const double u = rng.uniform();
      if (u < alpha_r) break;
      at = b.sample_neighbor(at, (u - alpha_r) / keep);
      if (stamp[at] != t) {
        stamp[at] = t;
        ++counts[at];
      }
    }
  }
}

}  // namespace

WalkCounts random_walk_counts(const CombinedGraph& b, NodeId q, double alpha_r, std::uint32_t n_w,
                              std::uint64_t rng_seed, unsigned workers) {
  if (q >= b.num_nodes()) throw invalid_argument("proximity", "seed node out of range");
  if (!(alpha_r > 0.0 && alpha_r < 1.0)) {
    throw invalid_argument("proximity", "alpha_r must lie in (0, 1)");
  }
  if (n_w == 0) throw invalid_argument("proximity", "n_w must be positive");
  if (b.degree(q) == 0) throw algorithm_error("proximity", "seed has no edges");
  workers = std::clamp(workers, 1u, n_w);

  WalkCounts out;
  out.trials = n_w;
  out.counts.assign(b.num_nodes(), 0);

  if (workers == 1) {
    run_trials(b, q, alpha_r, n_w, Rng(rng_seed, 0), out.counts);
  } else {
    std::vector<std::vector<std::uint32_t>> partial(workers,
                                                    std::vector<std::uint32_t>(b.num_nodes(), 0));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint32_t share = n_w / workers + (w < n_w % workers ? 1 : 0);
      pool.emplace_back([&, w, share] { run_trials(b, q, alpha_r, share, Rng(rng_seed, w), partial[w]); });
    }
    for (auto& t : pool) t.join();
    for (const auto& part : partial) {
      for (NodeId v = 0; v < b.num_nodes(); ++v) out.counts[v] += part[v];
    }
  }

  const double n = static_cast<double>(b.num_nodes());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint32_t c : out.counts) {
    sum += c;
    sum_sq += static_cast<double>(c) * c;
  }
  out.mean = sum / n;
  out.stddev = std::sqrt(std::max(0.0, sum_sq / n - out.mean * out.mean));
  return out;
}

double relevance_threshold(const WalkCounts& walks, double t_s) {
  if (!(t_s > 0.0)) throw invalid_argument("proximity", "t_s must be positive");
  return walks.mean + walks.stddev / t_s;
}

std::vector<NodeId> relevant_nodes(const WalkCounts& walks, NodeId q, double t_s) {
  const double threshold = relevance_threshold(walks, t_s);
  std::vector<NodeId> nodes;
  for (NodeId v = 0; v < walks.counts.size(); ++v) {
    if (v == q || walks.counts[v] > threshold) nodes.push_back(v);
  }
  return nodes;
}

Subgraph induced_subgraph(const CombinedGraph& b, std::span<const NodeId> nodes) {
  Subgraph sub;
  sub.node_map.assign(nodes.begin(), nodes.end());
  std::sort(sub.node_map.begin(), sub.node_map.end());
  sub.node_map.erase(std::unique(sub.node_map.begin(), sub.node_map.end()), sub.node_map.end());
  for (NodeId v : sub.node_map) {
    if (v >= b.num_nodes()) throw invalid_argument("proximity", "subgraph node out of range");
  }

  std::vector<WeightedEdge> edges;
  for (NodeId local = 0; local < sub.node_map.size(); ++local) {
    const NodeId u = sub.node_map[local];
    auto nb = b.neighbors(u);
    auto w = b.weights(u);
    auto flags = b.structural_flags(u);
    // both lists are sorted; merge to find members
    std::size_t k = 0;
    for (NodeId other = local + 1; other < sub.node_map.size() && k < nb.size(); ) {
      const NodeId v = sub.node_map[other];
      if (nb[k] < v) {
        ++k;
      } else if (v < nb[k]) {
        ++other;
      } else {
        edges.push_back({local, other, w[k], flags[k] != 0});
        ++k;
        ++other;
      }
    }
  }
  sub.graph = CombinedGraph(static_cast<NodeId>(sub.node_map.size()), edges);
  sub.boundary.resize(sub.node_map.size());
  for (NodeId local = 0; local < sub.node_map.size(); ++local) {
    const double outside = b.weighted_degree(sub.node_map[local]) - sub.graph.weighted_degree(local);
    sub.boundary[local] = outside > 1e-12 * b.weighted_degree(sub.node_map[local]) ? outside : 0.0;
  }
  sub.parent_volume = b.total_volume();
  return sub;
}

Subgraph whole_graph(const CombinedGraph& b) {
  Subgraph sub;
  sub.graph = b;
  sub.node_map.resize(b.num_nodes());
  for (NodeId v = 0; v < b.num_nodes(); ++v) sub.node_map[v] = v;
  sub.boundary.assign(b.num_nodes(), 0.0);
  sub.parent_volume = b.total_volume();
  return sub;
}

Subgraph local_proximity(const CombinedGraph& b, NodeId q, const ProximityParams& params,
                         WalkCounts& walks_out) {
  walks_out = random_walk_counts(b, q, params.alpha_r, params.n_w, params.rng_seed, params.workers);
  const std::vector<NodeId> nodes = relevant_nodes(walks_out, q, params.t_s);
  return induced_subgraph(b, nodes);
}

Subgraph local_proximity(const CombinedGraph& b, NodeId q, const ProximityParams& params) {
  WalkCounts walks;
  return local_proximity(b, q, params, walks);
}

}  // namespace richpart
