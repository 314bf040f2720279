#include "richpart/forecast.hpp"

#include <chrono>

#include "richpart/error.hpp"

namespace richpart {

Subgraph expanded_neighborhood(const Subgraph& t, const AttributeStore& attrs, double t_e,
                               ExpansionStats* stats) {
  if (!(t_e > 0.0 && t_e <= 1.0)) throw invalid_argument("forecast", "t_e must lie in (0, 1]");
  for (NodeId parent : t.node_map) {
    if (parent >= attrs.num_nodes()) throw invalid_argument("forecast", "attributes do not cover the subgraph");
  }

  const NodeId p = t.size();
  std::vector<WeightedEdge> edges = t.graph.edges();
  const std::size_t existing = edges.size();
  std::size_t pairs = 0;
  double added_weight = 0.0;
  // Pairs are visited in (u, v) lexicographic order, so the added edges come
  // out sorted and the result is deterministic.
  for (NodeId u = 0; u < p; ++u) {
    const auto tu = attrs.tokens(t.node_map[u]);
    for (NodeId v = u + 1; v < p; ++v) {
      ++pairs;
      const double j = jaccard(tu, attrs.tokens(t.node_map[v]));
      if (j > t_e && !t.graph.weight(u, v)) {
        edges.push_back({u, v, j, false});
        added_weight += j;
      }
    }
  }

  Subgraph out;
  out.graph = CombinedGraph(p, edges);
  out.node_map = t.node_map;
  out.boundary = t.boundary;
  out.parent_volume = t.parent_volume + 2.0 * added_weight;
  if (stats) {
    stats->pairs_examined = pairs;
    stats->edges_added = edges.size() - existing;
  }
  return out;
}

std::vector<WeightedEdge> predicted_edges(const Subgraph& t) {
  std::vector<WeightedEdge> out;
  for (const WeightedEdge& e : t.graph.edges()) {
    if (!e.structural) out.push_back({t.parent_id(e.u), t.parent_id(e.v), e.weight, false});
  }
  return out;
}

AttriPartRun run_local_forecasting(const CombinedGraph& b, const AttributeStore& attrs, NodeId q,
                                   const PartitionParams& params) {
  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };
  params.validate();
  if (q >= b.num_nodes()) throw invalid_argument("forecast", "seed node out of range");

  const auto start = Clock::now();
  Subgraph t = local_proximity(b, q, params.proximity());
  const double proximity_ms = ms_since(start);

  auto phase = Clock::now();
  Subgraph expanded = expanded_neighborhood(t, attrs, params.t_e);
  const double expansion_ms = ms_since(phase);

  AttriPartRun run = run_attripart_on_subgraph(b, std::move(expanded), q, params);
  PartitionResult& res = run.result;
  res.algorithm = "local-forecasting";
  res.predicted = true;
  res.predicted_edges = predicted_edges(run.subgraph);
  res.timings_ms.insert(res.timings_ms.begin(), {{"proximity", proximity_ms}, {"expansion", expansion_ms}});
  res.timings_ms.back().second = ms_since(start);
  return run;
}

PartitionResult local_forecasting(const CombinedGraph& b, const AttributeStore& attrs, NodeId q,
                                  const PartitionParams& params) {
  return run_local_forecasting(b, attrs, q, params).result;
}

}  // namespace richpart
