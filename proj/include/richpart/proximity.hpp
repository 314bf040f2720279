#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "richpart/graph.hpp"

namespace richpart {

/// Per-node distinct-visit counts from repeated random walks with restart.
struct WalkCounts {
  std::vector<std::uint32_t> counts;  // indexed by NodeId, size n
  std::uint32_t trials{0};
  double mean{0.0};    // population mean over all n nodes, zeros included
  double stddev{0.0};  // population standard deviation over all n nodes
};

/// Induced (or densified) piece of a combined graph, with its own dense ids.
struct Subgraph {
  CombinedGraph graph;
  /// Local id -> parent NodeId, strictly ascending.
  std::vector<NodeId> node_map;
  /// Per local node: weight of parent edges leading outside the subgraph.
  std::vector<double> boundary;
  /// Total weighted volume of the parent graph.
  double parent_volume{0.0};

  NodeId size() const noexcept { return static_cast<NodeId>(node_map.size()); }
  std::optional<NodeId> local_id(NodeId parent) const;
  NodeId parent_id(NodeId local) const { return node_map.at(local); }
  /// Weighted degree of a local node in the parent graph.
  double parent_degree(NodeId local) const { return graph.weighted_degree(local) + boundary[local]; }
};

struct ProximityParams {
  double alpha_r{0.15};
  std::uint32_t n_w{10000};
  double t_s{2.0};
  std::uint64_t rng_seed{42};
  /// Trials are sharded across this many rng streams (and threads). The
  /// result is reproducible for a fixed (rng_seed, workers) pair.
  unsigned workers{1};
};

/// Runs n_w walk trials from q. Each trial starts at q and, at every step,
/// ends with probability alpha_r or moves to a weight-proportional random
/// neighbor. A node is counted at most once per trial.
WalkCounts random_walk_counts(const CombinedGraph& b, NodeId q, double alpha_r, std::uint32_t n_w,
                              std::uint64_t rng_seed, unsigned workers = 1);

/// mean + stddev / t_s.
double relevance_threshold(const WalkCounts& walks, double t_s);

/// Nodes whose count strictly exceeds the relevance threshold, plus q,
/// in ascending order.
std::vector<NodeId> relevant_nodes(const WalkCounts& walks, NodeId q, double t_s);

/// Subgraph induced by `nodes` (need not be sorted; duplicates ignored).
Subgraph induced_subgraph(const CombinedGraph& b, std::span<const NodeId> nodes);

/// The whole graph viewed as a subgraph with the identity node map.
Subgraph whole_graph(const CombinedGraph& b);

/// Random-walk counts from q, relevance filtering, and induced subgraph
/// extraction.
Subgraph local_proximity(const CombinedGraph& b, NodeId q, const ProximityParams& params);

/// Same as above but also hands back the walk counts it used.
Subgraph local_proximity(const CombinedGraph& b, NodeId q, const ProximityParams& params,
                         WalkCounts& walks_out);

}  // namespace richpart
