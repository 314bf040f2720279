#include "richpart/ppr.hpp"

#include <algorithm>
#include <cmath>

#include "richpart/error.hpp"

namespace richpart {

NibbleParams nibble_params(std::size_t m, double phi_o, double c1) {
  if (m < 1) throw invalid_argument("pagerank", "nibble parameters need at least one edge");
  if (!(phi_o > 0.0 && phi_o < 1.0)) throw invalid_argument("pagerank", "phi_o must lie in (0, 1)");
  if (!(c1 > 0.0)) throw invalid_argument("pagerank", "c1 must be positive");

  const double md = static_cast<double>(m);
  NibbleParams p;
  p.c1 = c1;
  p.l = static_cast<std::uint32_t>(std::ceil(std::log2(md)));
  p.b = (1.0 + std::log2(md)) / 2.0;
  const double inner = std::ceil(2.0 / (phi_o * phi_o) * std::log(c1 * (p.l + 2.0) * std::sqrt(md)));
  p.t_last = static_cast<std::uint64_t>(p.l + 1) * static_cast<std::uint64_t>(std::max(1.0, inner));
  p.epsilon = 1.0 / (1800.0 * (p.l + 2.0) * static_cast<double>(p.t_last) * std::exp2(p.b));
  return p;
}

double RankVector::score(NodeId v) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), v,
                             [](const auto& e, NodeId key) { return e.first < key; });
  return it != entries.end() && it->first == v ? it->second : 0.0;
}

double RankVector::total() const {
  double s = 0.0;
  for (const auto& [v, x] : entries) s += x;
  return s;
}

RankVector RankVector::unit(NodeId q) {
  RankVector r;
  r.seed = q;
  r.entries.emplace_back(q, 1.0);
  return r;
}

namespace {

// `boundary` adds weight that leaves the graph: a walker taking it is lost.
struct CombinedView {
  const CombinedGraph& g;
  std::span<const double> boundary{};
  NodeId n() const { return g.num_nodes(); }
  double degree(NodeId v) const { return g.weighted_degree(v) + (boundary.empty() ? 0.0 : boundary[v]); }
  template <class F>
  void for_each_neighbor(NodeId v, F&& f) const {
    auto nb = g.neighbors(v);
    auto w = g.weights(v);
    for (std::size_t k = 0; k < nb.size(); ++k) f(nb[k], w[k]);
  }
};

struct StructureView {
  const StructureGraph& g;
  NodeId n() const { return g.num_nodes(); }
  double degree(NodeId v) const { return static_cast<double>(g.degree(v)); }
  template <class F>
  void for_each_neighbor(NodeId v, F&& f) const {
    for (NodeId u : g.neighbors(v)) f(u, 1.0);
  }
};

// y += x W, scanning nodes in ascending order so the summation order is fixed.
template <class View>
void lazy_step(const View& view, const std::vector<double>& x, std::vector<double>& y) {
  for (NodeId v = 0; v < view.n(); ++v) {
    const double mass = x[v];
    if (mass == 0.0) continue;
    const double d = view.degree(v);
    if (d <= 0.0) {
      y[v] += mass;
      continue;
    }
    y[v] += 0.5 * mass;
    const double share = 0.5 * mass / d;
    view.for_each_neighbor(v, [&](NodeId u, double w) { y[u] += share * w; });
  }
}

template <class View>
RankVector truncated_walk(const View& view, NodeId seed, double alpha, const NibbleParams& params,
                          double epsilon_t) {
  if (seed >= view.n()) throw invalid_argument("pagerank", "seed is not in the graph");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw invalid_argument("pagerank", "alpha_n must lie in (0, 1]");
  if (epsilon_t < 0.0) throw invalid_argument("pagerank", "epsilon_t must be non-negative");

  const NodeId n = view.n();
  std::vector<double> x(n, 0.0);
  std::vector<double> y(n, 0.0);
  x[seed] = 1.0;

  std::uint64_t iter = 0;
  while (iter < params.t_last) {
    std::fill(y.begin(), y.end(), 0.0);
    lazy_step(view, x, y);
    double delta = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      double val = (1.0 - alpha) * y[v];
      if (v == seed) val += alpha;
      if (val > 0.0) {
        const double d = view.degree(v);
        if (d > 0.0 && !(val / d > params.epsilon)) val = 0.0;
      }
      y[v] = val;
      delta += std::abs(val - x[v]);
    }
    std::swap(x, y);
    ++iter;
    if (delta < epsilon_t) break;
  }

  RankVector r;
  r.seed = seed;
  r.iterations = iter;
  for (NodeId v = 0; v < n; ++v) {
    if (x[v] > 0.0) r.entries.emplace_back(v, x[v]);
  }
  return r;
}

}  // namespace

RankVector lazy_transition_apply(const CombinedGraph& t, const RankVector& x) {
  std::vector<double> dense(t.num_nodes(), 0.0);
  for (const auto& [v, s] : x.entries) {
    if (v >= t.num_nodes()) throw invalid_argument("pagerank", "rank vector outside the graph");
    dense[v] = s;
  }
  std::vector<double> out(t.num_nodes(), 0.0);
  lazy_step(CombinedView{t}, dense, out);
  RankVector r;
  r.seed = x.seed;
  r.iterations = x.iterations;
  for (NodeId v = 0; v < t.num_nodes(); ++v) {
    if (out[v] > 0.0) r.entries.emplace_back(v, out[v]);
  }
  return r;
}

RankVector truncated_pagerank(const CombinedGraph& t, NodeId seed, double alpha_n,
                              const NibbleParams& params, double epsilon_t) {
  return truncated_walk(CombinedView{t}, seed, alpha_n, params, epsilon_t);
}

RankVector truncated_pagerank(const CombinedGraph& t, std::span<const double> boundary, NodeId seed,
                              double alpha_n, const NibbleParams& params, double epsilon_t) {
  if (!boundary.empty() && boundary.size() != t.num_nodes()) {
    throw invalid_argument("pagerank", "boundary size does not match the graph");
  }
  return truncated_walk(CombinedView{t, boundary}, seed, alpha_n, params, epsilon_t);
}

RankVector truncated_pagerank(const StructureGraph& g, NodeId seed, double alpha_n,
                              const NibbleParams& params, double epsilon_t) {
  return truncated_walk(StructureView{g}, seed, alpha_n, params, epsilon_t);
}

}  // namespace richpart
