#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "richpart/graph.hpp"
#include "richpart/ppr.hpp"
#include "richpart/proximity.hpp"

namespace richpart {

/// Every knob of the partitioning pipeline. Defaults follow the reference
/// experiment settings.
struct PartitionParams {
  double phi_o{0.05};       // target conductance
  double alpha_n{0.2};      // PageRank teleport
  double alpha_r{0.15};     // random-walk restart
  double t_s{2.0};          // relevance threshold
  std::uint32_t n_w{10000}; // walk trials
  std::size_t n_s{200};     // vertices to sweep
  double epsilon_t{0.01};   // iteration stop threshold
  double t_e{0.7};          // link-prediction threshold (forecasting only)
  double c1{kDefaultC1};
  std::uint64_t rng_seed{42};
  unsigned walk_workers{1};

  ProximityParams proximity() const { return {alpha_r, n_w, t_s, rng_seed, walk_workers}; }

  /// Throws Error(invalid_argument, "params") on out-of-range values.
  void validate() const;
};

struct SweepPoint {
  std::size_t prefix_size{0};
  double conductance{0.0};
};
using SweepTrace = std::vector<SweepPoint>;

struct PartitionResult {
  std::string algorithm;
  NodeId seed{0};
  VertexSet members;  // parent ids, in sweep order
  double parallel_conductance{0.0};
  double traditional_conductance{0.0};
  std::size_t sweep_position{0};  // size of the selected prefix
  bool met_target{false};
  bool predicted{false};
  SweepTrace trace;
  std::vector<std::pair<std::string, double>> timings_ms;
  PartitionParams params;
  std::size_t subgraph_nodes{0};
  std::size_t subgraph_edges{0};
  /// Attribute edges added by link prediction, in parent ids.
  std::vector<WeightedEdge> predicted_edges;

  bool contains_seed() const { return members.contains(seed); }
  double timing(const std::string& phase) const;
};

// ---------------------------------------------------------------------------
// Conductance metrics

/// cut(S) / min(vol(S), vol(V \ S)) with unit edge weights.
double traditional_conductance(const StructureGraph& g, const VertexSet& s);

/// Traditional conductance over the structural edges of a combined graph.
double traditional_conductance(const CombinedGraph& b, const VertexSet& s);

/// Sum over i in S of (weight from i to V \ S) / (weight from i to S).
/// Vertices without external weight contribute 0. A vertex with external
/// weight but no internal weight uses an internal weight of 1.0.
double parallel_cut(const CombinedGraph& b, const VertexSet& s);

/// parallel_cut(S) / vol(S). Throws when vol(S) == 0.
double parallel_conductance(const CombinedGraph& b, const VertexSet& s);

/// vol(S) <= vol(B) / 2, the regime where vol(S) is the smaller side.
bool volume_bound_holds(const CombinedGraph& b, const VertexSet& s);

// ---------------------------------------------------------------------------
// Sweep

struct SweepResult {
  VertexSet members;  // local ids of the chosen prefix
  double conductance{0.0};
  std::size_t position{0};
  bool met_target{false};
  SweepTrace trace;
  std::vector<NodeId> order;  // swept vertices, local ids
};

/// Orders the support of r by score / parent degree (degree in T plus its
/// boundary weight; descending, ties by ascending id), then grows prefixes
/// S_1, S_2, ... up to n_s vertices. Each prefix is scored by its parallel conductance in the parent graph,
/// using the subgraph's boundary weights for edges that leave T; the sweep
/// stops before the first prefix whose parent volume exceeds half the
/// parent volume. Returns the prefix with minimum conductance. Updates are
/// incremental, O(degree) per added vertex.
SweepResult sweep(const Subgraph& t, const RankVector& r, std::size_t n_s, double phi_o);

/// Sweep over a standalone graph (no boundary).
SweepResult sweep(const CombinedGraph& t, const RankVector& r, std::size_t n_s, double phi_o);

// ---------------------------------------------------------------------------
// Pipelines

/// Everything an AttriPart run produced, for callers that need more than
/// the final partition (rendering, accuracy probes).
struct AttriPartRun {
  PartitionResult result;
  Subgraph subgraph;
  RankVector rank;  // subgraph-local ids
  NibbleParams nibble;
  SweepResult sweep;
};

/// LocalProximity around q, then PageRank and sweep on the subgraph. The walk
/// treats the subgraph boundary as absorbing.
AttriPartRun run_attripart(const CombinedGraph& b, NodeId q, const PartitionParams& params);

/// PageRank and sweep on an already-prepared subgraph of b (q is a parent
/// id and must belong to t).
AttriPartRun run_attripart_on_subgraph(const CombinedGraph& b, Subgraph t, NodeId q,
                                       const PartitionParams& params);

PartitionResult attripart(const CombinedGraph& b, NodeId q, const PartitionParams& params);

/// Baseline: truncated lazy PageRank on the whole structure graph and a
/// sweep under traditional conductance. Returns the best prefix within n_s
/// even when phi_o is not reached. When `b` is given, the parallel
/// conductance of the result is filled in for comparison.
PartitionResult pagerank_nibble(const StructureGraph& g, NodeId q, const PartitionParams& params,
                                const CombinedGraph* b = nullptr);

}  // namespace richpart
