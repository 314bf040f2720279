#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "richpart/bench.hpp"
#include "richpart/error.hpp"
#include "richpart/proximity.hpp"

using namespace richpart;

namespace {

// |x - n p| within three binomial standard deviations.
bool in_binomial_band(double x, double n, double p) {
  return std::abs(x - n * p) <= 3.0 * std::sqrt(n * p * (1.0 - p));
}

WalkCounts with_counts(std::vector<std::uint32_t> counts) {
  WalkCounts w;
  w.counts = std::move(counts);
  double sum = 0, sq = 0;
  for (auto c : w.counts) {
    sum += c;
    sq += double(c) * c;
  }
  w.mean = sum / w.counts.size();
  w.stddev = std::sqrt(sq / w.counts.size() - w.mean * w.mean);
  return w;
}

}  // namespace

TEST_SUITE("proximity") {

TEST_CASE("two-node walk") {
  auto b = fixtures::plain_combined(fixtures::path(2));
  auto w = random_walk_counts(b, 0, 0.15, 10000, 1);
  CHECK(w.counts[0] == 10000);
  CHECK(in_binomial_band(w.counts[1], 10000, 0.85));
  CHECK(w.trials == 10000);
}

TEST_CASE("one trial always counts the seed") {
  auto b = fixtures::plain_combined(fixtures::cliques({5}));
  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(random_walk_counts(b, 2, 0.15, 1, seed).counts[2] == 1);
}

TEST_CASE("star leaves are symmetric") {
  auto b = fixtures::plain_combined(fixtures::star(4));
  // All leaves share one expectation; estimate it from an independent run.
  auto a = random_walk_counts(b, 0, 0.15, 10000, 3);
  auto c = random_walk_counts(b, 0, 0.15, 10000, 99);
  double ref = 0;
  for (NodeId v = 1; v <= 4; ++v) ref += c.counts[v];
  ref /= 4.0 * 10000.0;
  for (NodeId v = 1; v <= 4; ++v) CHECK(in_binomial_band(a.counts[v], 10000, ref));
}

TEST_CASE("star leaf closed form") {
  // From the center the walk continues with probability k = 0.85 and picks
  // one of 4 leaves; from a leaf it continues back to the center with k.
  // Let P be the chance that leaf 1 is never visited. The walk from the
  // center either stops (0.15), hits leaf 1 (k/4), or hits another leaf
  // (3k/4) and then returns with k or stops. P = 0.15 + 3k/4 (0.15 + k P).
  const double k = 0.85;
  const double p_miss = (0.15 + 0.75 * k * 0.15) / (1.0 - 0.75 * k * k);
  auto b = fixtures::plain_combined(fixtures::star(4));
  auto w = random_walk_counts(b, 0, 0.15, 20000, 17);
  for (NodeId v = 1; v <= 4; ++v) CHECK(in_binomial_band(w.counts[v], 20000, 1.0 - p_miss));
}

TEST_CASE("isolated seed and bad parameters") {
  auto b = fixtures::plain_combined(fixtures::make_graph(3, {{0, 1}}));
  CHECK_THROWS_AS(random_walk_counts(b, 2, 0.15, 10, 1), Error);
  try {
    random_walk_counts(b, 2, 0.15, 10, 1);
  } catch (const Error& e) {
    CHECK(e.stage() == "proximity");
    CHECK(e.message() == "seed has no edges");
  }
  CHECK_THROWS_AS(random_walk_counts(b, 0, 0.0, 10, 1), Error);
  CHECK_THROWS_AS(random_walk_counts(b, 0, 1.0, 10, 1), Error);
  CHECK_THROWS_AS(random_walk_counts(b, 0, 0.15, 0, 1), Error);
  CHECK_THROWS_AS(random_walk_counts(b, 7, 0.15, 10, 1), Error);
}

TEST_CASE("population statistics include zeros") {
  auto b = fixtures::plain_combined(fixtures::make_graph(6, {{0, 1}, {2, 3}, {3, 4}}));
  auto w = random_walk_counts(b, 0, 0.15, 1000, 5);
  CHECK(w.counts[2] == 0);
  CHECK(w.mean == doctest::Approx((1000.0 + w.counts[1]) / 6.0));
  const double m = w.mean;
  const double var = ((1000 - m) * (1000 - m) + (w.counts[1] - m) * (w.counts[1] - m) + 4 * m * m) / 6.0;
  CHECK(w.stddev == doctest::Approx(std::sqrt(var)));
}

TEST_CASE("relevance threshold arithmetic") {
  WalkCounts w;
  w.mean = 2.0;
  w.stddev = 6.0;
  CHECK(relevance_threshold(w, 2.0) == 5.0);
  CHECK(relevance_threshold(w, 5.0) == doctest::Approx(3.2));
  CHECK_THROWS_AS(relevance_threshold(w, 0.0), Error);
  CHECK_THROWS_AS(relevance_threshold(w, -1.0), Error);

  auto flat = with_counts({7, 7, 7, 7});
  CHECK(relevance_threshold(flat, 2.0) == 7.0);
  // nobody exceeds 7 strictly, the seed is kept anyway
  CHECK(relevant_nodes(flat, 1, 2.0) == std::vector<NodeId>{1});
}

TEST_CASE("threshold is strict") {
  // mean 3, stddev 2: threshold 4 at t_s = 2
  auto w = with_counts({4, 6, 2, 0, 3});
  CHECK(w.mean == 3.0);
  CHECK(w.stddev == doctest::Approx(2.0));
  CHECK(relevant_nodes(w, 3, 2.0) == std::vector<NodeId>{1, 3});
}

TEST_CASE("clique component") {
  auto g = fixtures::cliques({4, 6});
  auto b = fixtures::plain_combined(g);
  auto t = local_proximity(b, 1, {});
  CHECK(t.node_map == std::vector<NodeId>{0, 1, 2, 3});
  CHECK(t.graph.num_edges() == 6);
  for (double x : t.boundary) CHECK(x == 0.0);
}

TEST_CASE("barbell stays on the seed side") {
  auto pairs = fixtures::clique_pairs({10, 10});
  pairs.emplace_back(9, 10);
  auto b = fixtures::plain_combined(fixtures::make_graph(20, pairs));
  for (std::uint64_t rng = 1; rng <= 5; ++rng) {
    ProximityParams p;
    p.rng_seed = rng;
    auto t = local_proximity(b, 0, p);
    std::size_t first = 0, second = 0;
    for (NodeId v : t.node_map) (v < 10 ? first : second) += 1;
    CHECK(first == 10);
    CHECK(second <= 3);
  }
}

TEST_CASE("insensitive to the number of walks") {
  auto d = synth_attributed_graph({});
  auto b = build_combined_graph(d.graph, d.attributes);
  for (NodeId q : sample_seeds(d.graph, 5, 3)) {
    ProximityParams p;
    auto t1 = local_proximity(b, q, p);
    p.n_w = 20000;
    auto t2 = local_proximity(b, q, p);
    std::vector<NodeId> diff;
    std::set_symmetric_difference(t1.node_map.begin(), t1.node_map.end(), t2.node_map.begin(),
                                  t2.node_map.end(), std::back_inserter(diff));
    CHECK(double(diff.size()) / t1.size() <= 0.2);
  }
}

TEST_CASE("induced subgraph keeps parent weights and boundary") {
  auto ex = fixtures::example_community();
  std::vector<NodeId> nodes = {3, 0, 2, 1, 2};
  auto t = induced_subgraph(ex.combined, nodes);
  CHECK(t.node_map == std::vector<NodeId>{0, 1, 2, 3});
  CHECK(t.graph.num_edges() == 4);
  CHECK(*t.graph.weight(1, 3) == *ex.combined.weight(1, 3));
  CHECK(t.boundary[0] == doctest::Approx(1.05));
  CHECK(t.boundary[1] == 0.0);
  CHECK(t.parent_degree(2) == doctest::Approx(ex.combined.weighted_degree(2)));
  CHECK(t.parent_volume == doctest::Approx(ex.combined.total_volume()));
  CHECK(t.local_id(2) == 2u);
  CHECK(t.local_id(7) == std::nullopt);
  CHECK_THROWS_AS(induced_subgraph(ex.combined, std::vector<NodeId>{40}), Error);
}

TEST_CASE("multi-worker runs are reproducible") {
  auto d = synth_attributed_graph({});
  auto b = build_combined_graph(d.graph, d.attributes);
  auto a = random_walk_counts(b, 5, 0.15, 5000, 9, 3);
  auto c = random_walk_counts(b, 5, 0.15, 5000, 9, 3);
  CHECK(a.counts == c.counts);
  CHECK(a.counts[5] == 5000);
  auto single = random_walk_counts(b, 5, 0.15, 5000, 9, 1);
  CHECK(single.counts[5] == 5000);
}

TEST_CASE("walk-count histogram falls off on a scale-free graph") {
  auto g = preferential_attachment(5000, 3, 11);
  auto b = fixtures::plain_combined(g);
  // seed at a hub so the walks spread widely
  NodeId hub = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (g.degree(v) > g.degree(hub)) hub = v;
  auto w = random_walk_counts(b, hub, 0.15, 10000, 4);
  // bucket nonzero counts (seed excluded) into deciles of the count range
  std::uint32_t top = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (v != hub) top = std::max(top, w.counts[v]);
  std::vector<std::size_t> buckets(10, 0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (v == hub || w.counts[v] == 0) continue;
    buckets[std::min<std::size_t>(9, std::size_t(10.0 * w.counts[v] / (top + 1)))] += 1;
  }
  CHECK(buckets[0] > buckets[1]);
  CHECK(buckets[0] > 10 * (buckets[5] + buckets[6] + buckets[7] + buckets[8] + buckets[9]));
  // right-skewed: most visited nodes sit well below the mean count
  std::vector<std::uint32_t> seen;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (v != hub && w.counts[v] > 0) seen.push_back(w.counts[v]);
  const double mean = std::accumulate(seen.begin(), seen.end(), 0.0) / seen.size();
  std::nth_element(seen.begin(), seen.begin() + seen.size() / 2, seen.end());
  CHECK(seen[seen.size() / 2] < mean);
}

}  // TEST_SUITE
