#pragma once

#include <string>
#include <utility>
#include <vector>

#include "richpart/graph.hpp"
#include "richpart/random.hpp"

namespace fixtures {

using namespace richpart;

inline StructureGraph make_graph(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v});
  return StructureGraph(n, edges);
}

// Disjoint cliques of the given sizes, numbered consecutively.
inline std::vector<std::pair<NodeId, NodeId>> clique_pairs(std::vector<NodeId> sizes) {
  std::vector<std::pair<NodeId, NodeId>> out;
  NodeId base = 0;
  for (NodeId k : sizes) {
    for (NodeId i = 0; i < k; ++i)
      for (NodeId j = i + 1; j < k; ++j) out.emplace_back(base + i, base + j);
    base += k;
  }
  return out;
}

inline StructureGraph cliques(std::vector<NodeId> sizes) {
  NodeId n = 0;
  for (NodeId k : sizes) n += k;
  return make_graph(n, clique_pairs(sizes));
}

inline StructureGraph path(NodeId n) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  return make_graph(n, pairs);
}

inline StructureGraph star(NodeId leaves) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 1; i <= leaves; ++i) pairs.emplace_back(0, i);
  return make_graph(leaves + 1, pairs);
}

// G(n, p) plus a spanning path so every node has an edge.
inline StructureGraph random_graph(Rng& rng, NodeId n, double p, bool connect = true) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.push_back({u, v});
  if (connect)
    for (NodeId u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1});
  return StructureGraph(n, edges);
}

// Each node draws a few tokens out of a small vocabulary.
inline AttributeStore random_attributes(Rng& rng, NodeId n, std::uint32_t vocabulary = 8,
                                        std::uint32_t per_node = 3) {
  AttributeStore attrs(n);
  for (NodeId v = 0; v < n; ++v) {
    const auto k = rng.below(per_node + 1);
    for (std::uint64_t i = 0; i < k; ++i) attrs.add_token(v, "t" + std::to_string(rng.below(vocabulary)));
  }
  return attrs;
}

inline CombinedGraph plain_combined(const StructureGraph& g) {
  return build_combined_graph(g, AttributeStore(g.num_nodes()));
}

// Weighted graph on the structure of g with weights drawn from [1, 2].
inline CombinedGraph random_weights(Rng& rng, const StructureGraph& g) {
  std::vector<WeightedEdge> edges;
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v, 1.0 + rng.uniform(), true});
  return CombinedGraph(g.num_nodes(), edges);
}

// Nodes 0..3 form S. Per-vertex sums: node 0 has 2.1 inside and 1.05
// outside, node 2 has 2.2 inside and 1.05 outside, nodes 1 and 3 have
// nothing outside. vol(S) = 12. Nodes 4..9 are a K6 holding the two
// external neighbors.
struct ExampleCommunity {
  StructureGraph graph;
  AttributeStore attributes;
  CombinedGraph combined;
};

inline ExampleCommunity example_community() {
  std::vector<std::pair<NodeId, NodeId>> pairs = {{0, 1}, {0, 2}, {2, 3}, {1, 3}, {0, 4}, {2, 5}};
  for (auto [u, v] : clique_pairs({6})) pairs.emplace_back(u + 4, v + 4);
  ExampleCommunity out{make_graph(10, pairs), AttributeStore(10), {}};
  AttributeStore& a = out.attributes;
  auto add = [&](NodeId v, const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) a.add_token(v, t);
  };
  // J(1,3) = 7/10 and J(2,3) = 3/20; every other edge has J = 0.
  add(0, {"e1"});
  add(1, {"a1", "a2", "a3", "a4", "a5", "a6", "a7", "c1"});
  add(2, {"b1", "b2", "a1", "d1", "d2", "d3", "d4", "d5", "d6", "d7", "d8", "d9", "d10", "d11"});
  add(3, {"a1", "a2", "a3", "a4", "a5", "a6", "a7", "b1", "b2"});
  for (NodeId v = 4; v < 10; ++v) add(v, {"u" + std::to_string(v)});
  out.combined = build_combined_graph(out.graph, out.attributes);
  return out;
}

}  // namespace fixtures
