#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "richpart/graph.hpp"

namespace richpart {

/// Truncation and iteration budget for the truncated lazy PageRank walk.
struct NibbleParams {
  double b{0.0};               // (1 + log2 m) / 2
  std::uint32_t l{0};          // ceil(log2 m)
  std::uint64_t t_last{0};     // iteration cap
  double epsilon{0.0};         // truncation threshold on score / degree
  double c1{200.0};
};

inline constexpr double kDefaultC1 = 200.0;

/// b, l, t_last and epsilon for a graph with m edges and target
/// conductance phi_o:
///   l       = ceil(log2 m)
///   t_last  = (l + 1) * ceil(2 / phi^2 * ln(c1 (l + 2) sqrt(m)))
///   epsilon = 1 / (1800 (l + 2) t_last 2^b)
NibbleParams nibble_params(std::size_t m, double phi_o, double c1 = kDefaultC1);

/// Sparse score vector, entries sorted by node id, all scores > 0.
struct RankVector {
  std::vector<std::pair<NodeId, double>> entries;
  std::uint64_t iterations{0};
  NodeId seed{0};

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }
  double score(NodeId v) const;
  double total() const;

  /// Unit mass on q.
  static RankVector unit(NodeId q);
};

/// x W with W = 1/2 (I + D^-1 B). A node with zero weighted degree keeps its
/// mass.
RankVector lazy_transition_apply(const CombinedGraph& t, const RankVector& x);

/// Iterates q_t = (1 - alpha) r_{t-1} W + alpha s from the unit vector on
/// `seed`, zeroing every entry with score / degree <= epsilon after each
/// step and feeding the truncated vector into the next one. Stops after
/// params.t_last iterations, or earlier once the L1 change between
/// successive truncated vectors drops below epsilon_t.
RankVector truncated_pagerank(const CombinedGraph& t, NodeId seed, double alpha_n,
                              const NibbleParams& params, double epsilon_t);

/// Restricted walk on a subgraph: boundary[v] is the weight v sends outside
/// it. Degrees include that weight, so mass crossing it is dropped and scores
/// approximate the walk on the enclosing graph.
RankVector truncated_pagerank(const CombinedGraph& t, std::span<const double> boundary, NodeId seed,
                              double alpha_n, const NibbleParams& params, double epsilon_t);

/// Same iteration on an unweighted structure graph (unit edge weights).
RankVector truncated_pagerank(const StructureGraph& g, NodeId seed, double alpha_n,
                              const NibbleParams& params, double epsilon_t);

}  // namespace richpart
