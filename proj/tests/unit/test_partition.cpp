#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "richpart/bench.hpp"
#include "richpart/error.hpp"
#include "richpart/partition.hpp"

using namespace richpart;
using doctest::Approx;

namespace {

std::vector<NodeId> range(NodeId from, NodeId to) {
  std::vector<NodeId> v(to - from);
  std::iota(v.begin(), v.end(), from);
  return v;
}

VertexSet set_of(const std::vector<NodeId>& v) { return VertexSet(std::span<const NodeId>(v)); }

RankVector rank_from(const std::vector<std::pair<NodeId, double>>& entries) {
  RankVector r;
  r.entries = entries;
  std::sort(r.entries.begin(), r.entries.end());
  return r;
}

PartitionParams quick() {
  PartitionParams p;
  p.n_w = 2000;
  return p;
}

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("traditional conductance examples") {
  auto two = fixtures::cliques({3, 3});
  CHECK(traditional_conductance(two, VertexSet{0, 1, 2}) == 0.0);
  auto k4 = fixtures::cliques({4});
  CHECK(traditional_conductance(k4, VertexSet{2}) == 1.0);
  auto p4 = fixtures::path(4);
  CHECK(traditional_conductance(p4, VertexSet{0, 1}) == Approx(1.0 / 3.0));
  CHECK_THROWS_AS(traditional_conductance(p4, VertexSet{}), Error);
  CHECK_THROWS_AS(traditional_conductance(p4, VertexSet{0, 1, 2, 3}), Error);
  // combined graph version ignores weights
  auto b = fixtures::example_community();
  CHECK(traditional_conductance(b.combined, VertexSet{0, 1, 2, 3}) ==
        Approx(oracle::traditional_conductance(b.graph, {0, 1, 2, 3})));
}

TEST_CASE("parallel cut of the example community") {
  auto ex = fixtures::example_community();
  VertexSet s{0, 1, 2, 3};
  CHECK(parallel_cut(ex.combined, s) == Approx(0.5 + 1.05 / 2.2).epsilon(1e-12));
  CHECK(parallel_conductance(ex.combined, s) == Approx((0.5 + 1.05 / 2.2) / 12.0).epsilon(1e-12));
  CHECK(volume_bound_holds(ex.combined, s));
}

TEST_CASE("parallel cut edge cases") {
  auto b = fixtures::plain_combined(fixtures::cliques({3, 4}));
  CHECK(parallel_cut(b, VertexSet{0, 1, 2}) == 0.0);
  CHECK(parallel_conductance(b, VertexSet{3, 4, 5, 6}) == 0.0);
  // singleton: no internal weight, so the floor of 1 applies
  CHECK(parallel_cut(b, VertexSet{0}) == Approx(2.1));
  CHECK_THROWS_AS(parallel_cut(b, VertexSet{}), Error);
  auto lone = fixtures::plain_combined(fixtures::make_graph(3, {{0, 1}}));
  CHECK_THROWS_AS(parallel_conductance(lone, VertexSet{2}), Error);
}

TEST_CASE("per-vertex ratio classes") {
  // vertex 0 inside S with internal weight 2 and external weight 1, 2, 3
  for (double ext : {1.0, 2.0, 3.0}) {
    std::vector<WeightedEdge> e = {{0, 1, 2.0, true}, {0, 2, ext, true}, {2, 3, 1.0, true}};
    CombinedGraph b(4, e);
    const double term = parallel_cut(b, VertexSet{0, 1});
    if (ext < 2.0) CHECK(term < 1.0);
    if (ext == 2.0) CHECK(term == 1.0);
    if (ext > 2.0) CHECK(term > 1.0);
  }
}

TEST_CASE("parallel conductance matches the naive double loop") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = fixtures::random_graph(rng, 20 + trial, 0.15);
    auto b = fixtures::random_weights(rng, g);
    std::vector<NodeId> s;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      if (rng.bernoulli(0.3)) s.push_back(v);
    if (s.empty()) s.push_back(0);
    CHECK(parallel_conductance(b, set_of(s)) == Approx(oracle::parallel_conductance(b, s)).epsilon(1e-12));
  }
}

TEST_CASE("sweep over a single-entry rank vector") {
  auto b = fixtures::plain_combined(fixtures::cliques({4}));
  auto res = sweep(b, rank_from({{2, 0.3}}), 200, 0.05);
  CHECK(res.members.sorted() == std::vector<NodeId>{2});
  CHECK(res.trace.size() == 1);
  CHECK(res.position == 1);
  CHECK_THROWS_AS(sweep(b, RankVector{}, 200, 0.05), Error);
}

TEST_CASE("two loosely joined K5s") {
  auto pairs = fixtures::clique_pairs({5, 5});
  pairs.emplace_back(4, 5);
  auto b = fixtures::plain_combined(fixtures::make_graph(10, pairs));
  auto r = truncated_pagerank(b, 0, 0.2, nibble_params(b.num_edges(), 0.05), 0.0001);
  auto res = sweep(b, r, 200, 0.05);
  CHECK(res.members.sorted() == range(0, 5));
  CHECK(res.position == 5);

  // every prefix, naively
  std::vector<double> naive;
  std::vector<NodeId> prefix;
  for (NodeId v : res.order) {
    prefix.push_back(v);
    naive.push_back(oracle::parallel_conductance(b, prefix));
  }
  REQUIRE(res.trace.size() <= naive.size());
  naive.resize(res.trace.size());
  CHECK(oracle::argmin(naive) + 1 == res.position);
}

TEST_CASE("sweep trace equals naive recomputation with a boundary") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto b = fixtures::random_weights(rng, fixtures::random_graph(rng, 60, 0.08));
    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < 60; ++v)
      if (v < 25 || rng.bernoulli(0.2)) nodes.push_back(v);
    auto t = induced_subgraph(b, nodes);
    auto r = truncated_pagerank(t.graph, t.boundary, 0, 0.2, nibble_params(t.graph.num_edges(), 0.1), 0.0);
    auto res = sweep(t, r, 200, 0.1);
    std::vector<double> deg(t.size());
    for (NodeId v = 0; v < t.size(); ++v) deg[v] = t.parent_degree(v);
    auto order = oracle::sweep_order(r, deg);
    order.resize(std::min<std::size_t>(order.size(), 200));
    CHECK(std::equal(res.order.begin(), res.order.end(), order.begin(), order.end()));
    std::vector<NodeId> prefix;
    std::vector<double> naive;
    for (std::size_t j = 0; j < res.trace.size(); ++j) {
      prefix.push_back(t.parent_id(res.order[j]));
      naive.push_back(oracle::parallel_conductance(b, prefix));
      CHECK(res.trace[j].prefix_size == j + 1);
      CHECK(res.trace[j].conductance == Approx(naive[j]).epsilon(1e-9));
    }
    CHECK(oracle::argmin(naive) + 1 == res.position);
  }
}

TEST_CASE("sweep stops at half the parent volume") {
  auto b = fixtures::plain_combined(fixtures::path(8));
  RankVector r;
  for (NodeId v = 0; v < 8; ++v) r.entries.emplace_back(v, 1.0 - 0.1 * v);
  auto res = sweep(b, r, 200, 0.05);
  double vol = 0.0;
  for (std::size_t j = 0; j < res.trace.size(); ++j) vol += b.weighted_degree(res.order[j]);
  CHECK(vol <= 0.5 * b.total_volume() + 1e-12);
  CHECK(res.trace.size() < 8);
}

TEST_CASE("sweep respects n_s") {
  auto b = fixtures::plain_combined(fixtures::cliques({30}));
  RankVector r;
  for (NodeId v = 0; v < 30; ++v) r.entries.emplace_back(v, 1.0 / (v + 1));
  CHECK(sweep(b, r, 4, 0.05).trace.size() == 4);
  CHECK_THROWS_AS(sweep(b, r, 0, 0.05), Error);
}

TEST_CASE("attripart on disjoint K6s") {
  auto g = fixtures::cliques({6, 6, 6});
  auto b = fixtures::plain_combined(g);
  auto res = attripart(b, 8, {});
  CHECK(res.members.sorted() == range(6, 12));
  CHECK(res.parallel_conductance == 0.0);
  CHECK(res.met_target);
  CHECK(res.contains_seed());
  CHECK(res.algorithm == "attripart");
  CHECK(res.sweep_position <= res.params.n_s);
  CHECK(res.timing("total") >= res.timing("pagerank"));
}

TEST_CASE("defaults are accepted and echoed") {
  PartitionParams p;
  CHECK(p.phi_o == 0.05);
  CHECK(p.alpha_n == 0.2);
  CHECK(p.alpha_r == 0.15);
  CHECK(p.t_s == 2.0);
  CHECK(p.n_w == 10000);
  CHECK(p.n_s == 200);
  CHECK(p.epsilon_t == 0.01);
  auto b = fixtures::plain_combined(fixtures::cliques({6, 6}));
  auto res = attripart(b, 0, p);
  CHECK(res.params.phi_o == 0.05);
  CHECK(res.params.n_w == 10000);
}

TEST_CASE("parameter validation") {
  auto b = fixtures::plain_combined(fixtures::cliques({6}));
  auto bad = [&](auto mutate) {
    PartitionParams p;
    mutate(p);
    CHECK_THROWS_AS(attripart(b, 0, p), Error);
  };
  bad([](PartitionParams& p) { p.phi_o = 0.0; });
  bad([](PartitionParams& p) { p.phi_o = 1.0; });
  bad([](PartitionParams& p) { p.alpha_n = 0.0; });
  bad([](PartitionParams& p) { p.alpha_r = 1.0; });
  bad([](PartitionParams& p) { p.t_s = 0.0; });
  bad([](PartitionParams& p) { p.n_w = 0; });
  bad([](PartitionParams& p) { p.n_s = 0; });
  bad([](PartitionParams& p) { p.epsilon_t = -0.1; });
  CHECK_THROWS_AS(attripart(b, 9, {}), Error);
}

TEST_CASE("errors name their stage") {
  auto b = fixtures::plain_combined(fixtures::make_graph(3, {{0, 1}}));
  try {
    attripart(b, 2, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.stage() == "proximity");
    CHECK(e.kind() == ErrorKind::algorithm);
  }
}

TEST_CASE("pagerank-nibble on disjoint K6s") {
  auto g = fixtures::cliques({6, 6});
  auto b = fixtures::plain_combined(g);
  auto res = pagerank_nibble(g, 3, {}, &b);
  CHECK(res.members.sorted() == range(0, 6));
  CHECK(res.traditional_conductance == 0.0);
  CHECK(res.parallel_conductance == 0.0);
  CHECK(res.algorithm == "pagerank-nibble");
}

TEST_CASE("pagerank-nibble on a path returns a contiguous prefix") {
  auto g = fixtures::path(20);
  auto res = pagerank_nibble(g, 0, {});
  auto s = res.members.sorted();
  CHECK(s == range(0, static_cast<NodeId>(s.size())));
  CHECK(s.size() >= 2);
  CHECK(res.traditional_conductance == Approx(oracle::traditional_conductance(g, s)));
}

TEST_CASE("pagerank-nibble trace matches traditional conductance") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = fixtures::random_graph(rng, 40, 0.08);
    auto res = pagerank_nibble(g, 1, {});
    auto r = truncated_pagerank(g, 1, 0.2, nibble_params(g.num_edges(), 0.05), 0.01);
    std::vector<double> deg(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) deg[v] = static_cast<double>(g.degree(v));
    auto order = oracle::sweep_order(r, deg);
    std::vector<NodeId> prefix;
    std::vector<double> naive;
    for (std::size_t j = 0; j < res.trace.size(); ++j) {
      prefix.push_back(order[j]);
      naive.push_back(oracle::traditional_conductance(g, prefix));
      CHECK(res.trace[j].conductance == Approx(naive[j]).epsilon(1e-12));
    }
    CHECK(oracle::argmin(naive) + 1 == res.sweep_position);
  }
}

TEST_CASE("relabeling does not change conductance") {
  Rng rng(40);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = fixtures::random_graph(rng, 30, 0.1);
    auto attrs = fixtures::random_attributes(rng, 30);
    std::vector<NodeId> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    for (NodeId i = 29; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<Edge> moved;
    for (const auto& e : g.edges()) moved.push_back({perm[e.u], perm[e.v]});
    AttributeStore pa(30);
    for (NodeId v = 0; v < 30; ++v)
      for (const auto& t : attrs.token_labels(v)) pa.add_token(perm[v], t);
    auto b = build_combined_graph(g, attrs);
    auto pb = build_combined_graph(StructureGraph(30, moved), pa);
    std::vector<NodeId> s, ps;
    for (NodeId v = 0; v < 30; v += 3) {
      s.push_back(v);
      ps.push_back(perm[v]);
    }
    CHECK(parallel_conductance(b, set_of(s)) == Approx(parallel_conductance(pb, set_of(ps))).epsilon(1e-12));
    CHECK(traditional_conductance(g, set_of(s)) ==
          Approx(traditional_conductance(StructureGraph(30, moved), set_of(ps))));
  }
}

TEST_CASE("seed membership is reported, not forced") {
  auto d = synth_attributed_graph({});
  auto b = build_combined_graph(d.graph, d.attributes);
  for (NodeId q : sample_seeds(d.graph, 10, 2)) {
    auto res = attripart(b, q, quick());
    CHECK(res.contains_seed() == res.members.contains(q));
    CHECK(!res.members.empty());
  }
}

}  // TEST_SUITE
