#include "richpart/partition.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "richpart/error.hpp"

namespace richpart {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Traditional conductance, or NaN when the denominator degenerates.
template <class F>
double conductance_or_nan(F&& compute) {
  try {
    return compute();
  } catch (const Error&) {
    return kNaN;
  }
}

// Orders the support of r by score / degree descending, ties by ascending
// id, keeping only the first `limit` entries.
template <class Degree>
std::vector<NodeId> sweep_order(const RankVector& r, std::size_t limit, Degree&& degree) {
  struct Key {
    double ratio;
    NodeId id;
  };
  std::vector<Key> keys;
  keys.reserve(r.size());
  for (const auto& [v, score] : r.entries) {
    const double d = degree(v);
    keys.push_back({d > 0.0 ? score / d : std::numeric_limits<double>::infinity(), v});
  }
  auto before = [](const Key& a, const Key& b) {
    return a.ratio != b.ratio ? a.ratio > b.ratio : a.id < b.id;
  };
  limit = std::min(limit, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(limit), keys.end(), before);
  std::vector<NodeId> order(limit);
  for (std::size_t i = 0; i < limit; ++i) order[i] = keys[i].id;
  return order;
}

// Core parallel-conductance sweep. `boundary` holds, per node, the parent
// weight leaving `t` (empty means none).
SweepResult parallel_sweep(const CombinedGraph& t, std::span<const double> boundary,
                           double parent_volume, const RankVector& r, std::size_t n_s,
                           double phi_o) {
  if (r.empty()) throw algorithm_error("sweep", "rank vector empty");
  if (n_s == 0) throw invalid_argument("sweep", "n_s must be positive");
  for (const auto& [v, score] : r.entries) {
    if (v >= t.num_nodes()) throw invalid_argument("sweep", "rank vector outside the graph");
  }

  const NodeId p = t.num_nodes();
  auto parent_degree = [&](NodeId v) {
    return t.weighted_degree(v) + (boundary.empty() ? 0.0 : boundary[v]);
  };

  SweepResult out;
  out.order = sweep_order(r, n_s, parent_degree);

  std::vector<std::uint8_t> in_s(p, 0);
  std::vector<double> internal(p, 0.0);
  std::vector<double> term(p, 0.0);
  auto ratio_term = [&](NodeId u) {
    const double d = parent_degree(u);
    const double external = d - internal[u];
    if (external <= 1e-12 * d) return 0.0;
    return external / (internal[u] > 0.0 ? internal[u] : 1.0);
  };

  double cut = 0.0;
  std::size_t cut_terms = 0;  // nonzero terms; lets a closed prefix read exactly 0
  double vol = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_pos = 0;
  const double half = 0.5 * parent_volume;

  for (std::size_t j = 0; j < out.order.size(); ++j) {
    const NodeId v = out.order[j];
    const double dv = parent_degree(v);
    if (j > 0 && vol + dv > half) break;

    double inside = 0.0;
    auto nb = t.neighbors(v);
    auto w = t.weights(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const NodeId u = nb[k];
      if (!in_s[u]) continue;
      inside += w[k];
      internal[u] += w[k];
      cut -= term[u];
      cut_terms -= term[u] != 0.0;
      term[u] = ratio_term(u);
      cut += term[u];
      cut_terms += term[u] != 0.0;
    }
    in_s[v] = 1;
    internal[v] = inside;
    term[v] = ratio_term(v);
    cut += term[v];
    cut_terms += term[v] != 0.0;
    if (cut_terms == 0) cut = 0.0;
    vol += dv;
    if (!(vol > 0.0)) throw algorithm_error("sweep", "prefix has zero volume");

    const double phi = std::max(0.0, cut) / vol;
    out.trace.push_back({j + 1, phi});
    if (phi < best) {
      best = phi;
      best_pos = j + 1;
    }
  }

  out.conductance = best;
  out.position = best_pos;
  out.met_target = best < phi_o;
  for (std::size_t j = 0; j < best_pos; ++j) out.members.insert(out.order[j]);
  return out;
}

}  // namespace

void PartitionParams::validate() const {
  auto fail = [](const char* what) { throw invalid_argument("params", what); };
  if (!(phi_o > 0.0 && phi_o < 1.0)) fail("phi must lie in (0, 1)");
  if (!(alpha_n > 0.0 && alpha_n <= 1.0)) fail("alpha_n must lie in (0, 1]");
  if (!(alpha_r > 0.0 && alpha_r < 1.0)) fail("alpha_r must lie in (0, 1)");
  if (!(t_s > 0.0)) fail("ts must be positive");
  if (n_w < 1) fail("nw must be at least 1");
  if (n_s < 1) fail("ns must be at least 1");
  if (!(epsilon_t >= 0.0)) fail("epsilon_t must be non-negative");
  if (!(t_e > 0.0 && t_e <= 1.0)) fail("te must lie in (0, 1]");
  if (!(c1 > 0.0)) fail("c1 must be positive");
  if (walk_workers < 1) fail("walk workers must be at least 1");
}

double PartitionResult::timing(const std::string& phase) const {
  for (const auto& [name, ms] : timings_ms) {
    if (name == phase) return ms;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

double traditional_conductance(const StructureGraph& g, const VertexSet& s) {
  if (s.empty()) throw invalid_argument("partition", "conductance of an empty set");
  std::vector<std::uint8_t> in_s(g.num_nodes(), 0);
  for (NodeId v : s) {
    if (v >= g.num_nodes()) throw invalid_argument("partition", "vertex out of range");
    in_s[v] = 1;
  }
  if (s.size() == g.num_nodes()) throw invalid_argument("partition", "conductance of the full vertex set");
  std::size_t cut = 0;
  std::size_t vol = 0;
  for (NodeId v : s) {
    vol += g.degree(v);
    for (NodeId u : g.neighbors(v)) cut += in_s[u] ? 0 : 1;
  }
  const std::size_t denom = std::min(vol, g.volume() - vol);
  if (denom == 0) throw invalid_argument("partition", "zero-volume side in conductance");
  return static_cast<double>(cut) / static_cast<double>(denom);
}

double traditional_conductance(const CombinedGraph& b, const VertexSet& s) {
  if (s.empty()) throw invalid_argument("partition", "conductance of an empty set");
  std::vector<std::uint8_t> in_s(b.num_nodes(), 0);
  for (NodeId v : s) {
    if (v >= b.num_nodes()) throw invalid_argument("partition", "vertex out of range");
    in_s[v] = 1;
  }
  if (s.size() == b.num_nodes()) throw invalid_argument("partition", "conductance of the full vertex set");
  std::size_t cut = 0;
  std::size_t vol = 0;
  for (NodeId v : s) {
    vol += b.structural_degree(v);
    auto nb = b.neighbors(v);
    auto flags = b.structural_flags(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (flags[k] && !in_s[nb[k]]) ++cut;
    }
  }
  const std::size_t denom = std::min(vol, 2 * b.num_structural_edges() - vol);
  if (denom == 0) throw invalid_argument("partition", "zero-volume side in conductance");
  return static_cast<double>(cut) / static_cast<double>(denom);
}

double parallel_cut(const CombinedGraph& b, const VertexSet& s) {
  if (s.empty()) throw invalid_argument("partition", "parallel cut of an empty set");
  double total = 0.0;
  for (NodeId i : s) {
    if (i >= b.num_nodes()) throw invalid_argument("partition", "vertex out of range");
    double inside = 0.0;
    double outside = 0.0;
    auto nb = b.neighbors(i);
    auto w = b.weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      (s.contains(nb[k]) ? inside : outside) += w[k];
    }
    if (outside > 0.0) total += outside / (inside > 0.0 ? inside : 1.0);
  }
  return total;
}

double parallel_conductance(const CombinedGraph& b, const VertexSet& s) {
  const double vol = volume(b, s);
  if (!(vol > 0.0)) throw invalid_argument("partition", "parallel conductance of a zero-volume set");
  return parallel_cut(b, s) / vol;
}

bool volume_bound_holds(const CombinedGraph& b, const VertexSet& s) {
  return volume(b, s) <= 0.5 * b.total_volume();
}

// ---------------------------------------------------------------------------

SweepResult sweep(const Subgraph& t, const RankVector& r, std::size_t n_s, double phi_o) {
  return parallel_sweep(t.graph, t.boundary, t.parent_volume, r, n_s, phi_o);
}

SweepResult sweep(const CombinedGraph& t, const RankVector& r, std::size_t n_s, double phi_o) {
  return parallel_sweep(t, {}, t.total_volume(), r, n_s, phi_o);
}

// ---------------------------------------------------------------------------

AttriPartRun run_attripart_on_subgraph(const CombinedGraph& b, Subgraph t, NodeId q,
                                       const PartitionParams& params) {
  params.validate();
  const auto start = Clock::now();
  const auto local = t.local_id(q);
  if (!local) throw invalid_argument("attripart", "seed is not part of the subgraph");

  AttriPartRun run;
  // A subgraph holding only the seed has no edges; the formulas need m >= 1.
  run.nibble = nibble_params(std::max<std::size_t>(1, t.graph.num_edges()), params.phi_o, params.c1);

  auto phase = Clock::now();
  run.rank = truncated_pagerank(t.graph, t.boundary, *local, params.alpha_n, run.nibble, params.epsilon_t);
  const double pagerank_ms = elapsed_ms(phase);

  phase = Clock::now();
  run.sweep = sweep(t, run.rank, params.n_s, params.phi_o);
  const double sweep_ms = elapsed_ms(phase);

  PartitionResult& res = run.result;
  res.algorithm = "attripart";
  res.seed = q;
  for (NodeId v : run.sweep.members) res.members.insert(t.parent_id(v));
  res.parallel_conductance = run.sweep.conductance;
  res.traditional_conductance = conductance_or_nan([&] { return traditional_conductance(b, res.members); });
  res.sweep_position = run.sweep.position;
  res.met_target = run.sweep.met_target;
  res.trace = run.sweep.trace;
  res.params = params;
  res.subgraph_nodes = t.size();
  res.subgraph_edges = t.graph.num_edges();
  res.timings_ms = {{"pagerank", pagerank_ms}, {"sweep", sweep_ms}, {"total", elapsed_ms(start)}};
  run.subgraph = std::move(t);
  return run;
}

AttriPartRun run_attripart(const CombinedGraph& b, NodeId q, const PartitionParams& params) {
  params.validate();
  if (q >= b.num_nodes()) throw invalid_argument("attripart", "seed node out of range");
  const auto start = Clock::now();
  Subgraph t = local_proximity(b, q, params.proximity());
  const double proximity_ms = elapsed_ms(start);

  AttriPartRun run = run_attripart_on_subgraph(b, std::move(t), q, params);
  auto& timings = run.result.timings_ms;
  timings.insert(timings.begin(), {"proximity", proximity_ms});
  timings.back().second = elapsed_ms(start);
  return run;
}

PartitionResult attripart(const CombinedGraph& b, NodeId q, const PartitionParams& params) {
  return run_attripart(b, q, params).result;
}

PartitionResult pagerank_nibble(const StructureGraph& g, NodeId q, const PartitionParams& params,
                                const CombinedGraph* b) {
  params.validate();
  if (q >= g.num_nodes()) throw invalid_argument("pagerank-nibble", "seed node out of range");
  if (g.degree(q) == 0) throw algorithm_error("pagerank", "seed has no edges");
  const auto start = Clock::now();

  const NibbleParams nibble = nibble_params(std::max<std::size_t>(1, g.num_edges()), params.phi_o, params.c1);
  auto phase = Clock::now();
  const RankVector rank = truncated_pagerank(g, q, params.alpha_n, nibble, params.epsilon_t);
  const double pagerank_ms = elapsed_ms(phase);

  phase = Clock::now();
  const std::vector<NodeId> order =
      sweep_order(rank, params.n_s, [&](NodeId v) { return static_cast<double>(g.degree(v)); });
  std::vector<std::uint8_t> in_s(g.num_nodes(), 0);
  const std::size_t total = g.volume();
  std::size_t cut = 0;
  std::size_t vol = 0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_pos = 0;
  SweepTrace trace;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const NodeId v = order[j];
    const std::size_t dv = g.degree(v);
    if (j > 0 && 2 * (vol + dv) > total) break;
    std::size_t inside = 0;
    for (NodeId u : g.neighbors(v)) inside += in_s[u];
    in_s[v] = 1;
    cut = cut + dv - 2 * inside;
    vol += dv;
    const std::size_t denom = std::min(vol, total - vol);
    const double phi = denom > 0 ? static_cast<double>(cut) / static_cast<double>(denom) : 1.0;
    trace.push_back({j + 1, phi});
    if (phi < best) {
      best = phi;
      best_pos = j + 1;
    }
  }
  const double sweep_ms = elapsed_ms(phase);

  PartitionResult res;
  res.algorithm = "pagerank-nibble";
  res.seed = q;
  for (std::size_t j = 0; j < best_pos; ++j) res.members.insert(order[j]);
  res.traditional_conductance = best;
  res.parallel_conductance =
      b ? conductance_or_nan([&] { return parallel_conductance(*b, res.members); }) : kNaN;
  res.sweep_position = best_pos;
  res.met_target = best < params.phi_o;
  res.trace = std::move(trace);
  res.params = params;
  res.subgraph_nodes = g.num_nodes();
  res.subgraph_edges = g.num_edges();
  res.timings_ms = {{"pagerank", pagerank_ms}, {"sweep", sweep_ms}, {"total", elapsed_ms(start)}};
  return res;
}

}  // namespace richpart
