#include "richpart/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "richpart/error.hpp"
#include "richpart/forecast.hpp"
#include "richpart/random.hpp"

namespace richpart {

namespace {

// Runs task(i) for i in [0, count) on up to `workers` threads. The first
// exception is rethrown after all threads finish.
template <class Task>
void parallel_for(std::size_t count, unsigned workers, Task&& task) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, count))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::uint8_t> membership(NodeId n, const VertexSet& s) {
  std::vector<std::uint8_t> in_s(n, 0);
  for (NodeId v : s) {
    if (v >= n) throw invalid_argument("bench", "vertex out of range");
    in_s[v] = 1;
  }
  return in_s;
}

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

std::vector<std::uint64_t> induced_edge_keys(const StructureGraph& g, const VertexSet& s) {
  const auto in_s = membership(g.num_nodes(), s);
  std::vector<std::uint64_t> keys;
  for (NodeId u : s) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v && in_s[v]) keys.push_back(pair_key(u, v));
    }
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

template <class T>
std::size_t symmetric_difference_size(std::vector<T> a, std::vector<T> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<T> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

MetricSummary summarize_values(const std::vector<double>& xs) {
  MetricSummary m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - m.mean) * (x - m.mean);
  m.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t induced_edge_count(const StructureGraph& g, const VertexSet& s) {
  const auto in_s = membership(g.num_nodes(), s);
  std::size_t m = 0;
  for (NodeId u : s) {
    for (NodeId v : g.neighbors(u)) m += (u < v && in_s[v]) ? 1 : 0;
  }
  return m;
}

double density(const StructureGraph& g, const VertexSet& s) {
  if (s.size() < 2) throw invalid_argument("bench", "density needs at least two vertices");
  const double k = static_cast<double>(s.size());
  return 2.0 * static_cast<double>(induced_edge_count(g, s)) / (k * (k - 1.0));
}

double density(const CombinedGraph& b, const VertexSet& s) {
  if (s.size() < 2) throw invalid_argument("bench", "density needs at least two vertices");
  const auto in_s = membership(b.num_nodes(), s);
  std::size_t m = 0;
  for (NodeId u : s) {
    auto nb = b.neighbors(u);
    auto flags = b.structural_flags(u);
    for (std::size_t k = 0; k < nb.size(); ++k) m += (flags[k] && u < nb[k] && in_s[nb[k]]) ? 1 : 0;
  }
  const double k = static_cast<double>(s.size());
  return 2.0 * static_cast<double>(m) / (k * (k - 1.0));
}

std::uint64_t triangle_count(const StructureGraph& g, const VertexSet& s) {
  const auto in_s = membership(g.num_nodes(), s);
  // neighbor lists restricted to S, sorted
  std::uint64_t triangles = 0;
  std::vector<NodeId> nu;
  std::vector<NodeId> nv;
  for (NodeId u : s) {
    nu.clear();
    for (NodeId x : g.neighbors(u)) {
      if (in_s[x]) nu.push_back(x);
    }
    for (NodeId v : nu) {
      if (v <= u) continue;
      nv.clear();
      for (NodeId x : g.neighbors(v)) {
        if (in_s[x] && x > v) nv.push_back(x);
      }
      // w > v > u, w adjacent to both
      auto it = std::upper_bound(nu.begin(), nu.end(), v);
      std::size_t common = 0;
      auto jt = nv.begin();
      while (it != nu.end() && jt != nv.end()) {
        if (*it < *jt) {
          ++it;
        } else if (*jt < *it) {
          ++jt;
        } else {
          ++common;
          ++it;
          ++jt;
        }
      }
      triangles += common;
    }
  }
  return 3 * triangles;
}

// ---------------------------------------------------------------------------

StructureGraph remove_edges(const StructureGraph& g, double fraction, std::uint64_t rng_seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw invalid_argument("bench", "fraction must lie in [0, 1)");
  std::vector<Edge> edges = g.edges();
  const auto drop = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(edges.size())));
  Rng rng(rng_seed);
  // partial Fisher-Yates: the first `drop` slots become the removed edges
  for (std::size_t i = 0; i < drop; ++i) {
    const std::size_t j = i + rng.below(edges.size() - i);
    std::swap(edges[i], edges[j]);
  }
  std::span<const Edge> kept(edges.data() + drop, edges.size() - drop);
  return StructureGraph(g.num_nodes(), kept);
}

SynthDataset synth_attributed_graph(const SynthConfig& c) {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(c.p_in) || !in_unit(c.p_out) || !in_unit(c.noise)) {
    throw invalid_argument("synth", "probabilities must lie in [0, 1]");
  }
  if (c.blocks == 0 || c.block_size == 0) throw invalid_argument("synth", "need at least one block and node");
  if (c.tokens_per_block == 0) throw invalid_argument("synth", "token pool must be non-empty");

  const std::uint64_t n64 = static_cast<std::uint64_t>(c.blocks) * c.block_size;
  if (n64 > UINT32_MAX) throw invalid_argument("synth", "too many nodes");
  const NodeId n = static_cast<NodeId>(n64);
  Rng rng(c.rng_seed);

  SynthDataset out;
  out.block_of.resize(n);
  for (NodeId v = 0; v < n; ++v) out.block_of[v] = v / c.block_size;

  std::vector<Edge> edges;
  for (std::uint32_t blk = 0; blk < c.blocks; ++blk) {
    const NodeId base = blk * c.block_size;
    for (NodeId i = 0; i < c.block_size; ++i) {
      for (NodeId j = i + 1; j < c.block_size; ++j) {
        if (rng.bernoulli(c.p_in)) edges.push_back({base + i, base + j});
      }
    }
  }

  const double total_pairs = static_cast<double>(n) * (n - 1.0) / 2.0;
  const double intra_pairs = c.blocks * (c.block_size * (c.block_size - 1.0) / 2.0);
  const double inter_pairs = total_pairs - intra_pairs;
  if (c.p_out > 0.0 && inter_pairs > 0.0) {
    if (inter_pairs <= 2.0e7) {
      for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
          if (out.block_of[u] != out.block_of[v] && rng.bernoulli(c.p_out)) edges.push_back({u, v});
        }
      }
    } else {
      // sparse regime: a fixed number of distinct inter-block pairs
      const auto target = static_cast<std::size_t>(std::llround(inter_pairs * c.p_out));
      std::unordered_set<std::uint64_t> seen;
      seen.reserve(2 * target);
      while (seen.size() < target) {
        const auto u = static_cast<NodeId>(rng.below(n));
        const auto v = static_cast<NodeId>(rng.below(n));
        if (u == v || out.block_of[u] == out.block_of[v]) continue;
        if (seen.insert(pair_key(u, v)).second) edges.push_back({u, v});
      }
    }
  }
  out.graph = StructureGraph(n, edges);

  out.attributes = AttributeStore(n);
  for (NodeId v = 0; v < n; ++v) {
    for (std::uint32_t k = 0; k < c.tokens_per_node; ++k) {
      std::uint32_t pool = out.block_of[v];
      if (c.blocks > 1 && rng.bernoulli(c.noise)) {
        pool = static_cast<std::uint32_t>(rng.below(c.blocks - 1));
        if (pool >= out.block_of[v]) ++pool;
      }
      const auto tok = rng.below(c.tokens_per_block);
      out.attributes.add_token(v, "b" + std::to_string(pool) + "_t" + std::to_string(tok));
    }
  }
  return out;
}

SynthConfig synth_config_for_degree(std::uint32_t target_nodes, std::uint32_t block_size,
                                    double intra_degree, double inter_degree, std::uint64_t rng_seed) {
  if (block_size < 2) throw invalid_argument("synth", "block size must be at least 2");
  SynthConfig c;
  c.block_size = block_size;
  c.blocks = std::max<std::uint32_t>(1, target_nodes / block_size);
  const double n = static_cast<double>(c.blocks) * block_size;
  c.p_in = std::min(1.0, intra_degree / (block_size - 1.0));
  c.p_out = c.blocks > 1 ? std::min(1.0, inter_degree / (n - block_size)) : 0.0;
  c.rng_seed = rng_seed;
  return c;
}

StructureGraph preferential_attachment(NodeId n, std::uint32_t links, std::uint64_t rng_seed) {
  if (links == 0 || n <= links) throw invalid_argument("synth", "need n > links >= 1");
  Rng rng(rng_seed);
  std::vector<Edge> edges;
  std::vector<NodeId> endpoints;  // each node once per incident edge
  // seed clique on links + 1 nodes
  for (NodeId u = 0; u <= links; ++u) {
    for (NodeId v = u + 1; v <= links; ++v) {
      edges.push_back({u, v});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  std::vector<NodeId> chosen;
  for (NodeId v = links + 1; v < n; ++v) {
    chosen.clear();
    while (chosen.size() < links) {
      const NodeId u = endpoints[rng.below(endpoints.size())];
      if (std::find(chosen.begin(), chosen.end(), u) == chosen.end()) chosen.push_back(u);
    }
    for (NodeId u : chosen) {
      edges.push_back({u, v});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  return StructureGraph(n, edges);
}

AttributeStore shuffle_attributes(const AttributeStore& attrs, std::uint64_t rng_seed) {
  const NodeId n = attrs.num_nodes();
  std::vector<NodeId> perm(n);
  for (NodeId v = 0; v < n; ++v) perm[v] = v;
  Rng rng(rng_seed);
  for (NodeId i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  AttributeStore out(n);
  for (NodeId v = 0; v < n; ++v) {
    for (const std::string& tok : attrs.token_labels(perm[v])) out.add_token(v, tok);
  }
  return out;
}

std::vector<NodeId> sample_seeds(const StructureGraph& g, std::size_t count, std::uint64_t rng_seed) {
  std::vector<NodeId> candidates;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.degree(v) > 0) candidates.push_back(v);
  }
  if (candidates.empty()) throw data_error("bench", "dataset has no non-isolated nodes");
  Rng rng(rng_seed);
  count = std::min(count, candidates.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(candidates[i], candidates[i + rng.below(candidates.size() - i)]);
  }
  candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

// ---------------------------------------------------------------------------

ReportRow make_row(const DatasetView& data, const PartitionResult& result) {
  ReportRow row;
  row.dataset = data.name;
  row.seed = result.seed;
  row.seed_label = data.labels ? data.labels->label(result.seed) : std::to_string(result.seed);
  row.algorithm = result.algorithm;
  row.size = result.members.size();
  row.density = row.size >= 2 ? density(data.graph, result.members) : 0.0;
  row.triangles = triangle_count(data.graph, result.members);
  row.parallel_conductance = result.parallel_conductance;
  row.traditional_conductance = result.traditional_conductance;
  row.wall_ms = result.timing("total");
  row.members = result.members.sorted();
  return row;
}

std::vector<AlgorithmSummary> summarize(const std::vector<ReportRow>& rows) {
  std::vector<std::string> names;
  for (const ReportRow& r : rows) {
    if (std::find(names.begin(), names.end(), r.algorithm) == names.end()) names.push_back(r.algorithm);
  }
  std::sort(names.begin(), names.end());
  std::vector<AlgorithmSummary> out;
  for (const std::string& name : names) {
    std::vector<double> size, dens, tri, par, trad, wall;
    for (const ReportRow& r : rows) {
      if (r.algorithm != name) continue;
      size.push_back(static_cast<double>(r.size));
      dens.push_back(r.density);
      tri.push_back(static_cast<double>(r.triangles));
      par.push_back(r.parallel_conductance);
      trad.push_back(r.traditional_conductance);
      wall.push_back(r.wall_ms);
    }
    AlgorithmSummary s;
    s.algorithm = name;
    s.runs = size.size();
    s.size = summarize_values(size);
    s.density = summarize_values(dens);
    s.triangles = summarize_values(tri);
    s.parallel_conductance = summarize_values(par);
    s.traditional_conductance = summarize_values(trad);
    s.wall_ms = summarize_values(wall);
    out.push_back(s);
  }
  return out;
}

ExperimentReport compare_partitioners(const DatasetView& data, std::size_t n_seeds,
                                      const PartitionParams& params, std::uint64_t rng_seed,
                                      unsigned workers) {
  params.validate();
  const std::vector<NodeId> seeds = sample_seeds(data.graph, n_seeds, rng_seed);
  std::vector<ReportRow> rows(2 * seeds.size());
  parallel_for(seeds.size(), workers, [&](std::size_t i) {
    const NodeId q = seeds[i];
    rows[2 * i] = make_row(data, attripart(data.combined, q, params));
    rows[2 * i + 1] = make_row(data, pagerank_nibble(data.graph, q, params, &data.combined));
  });
  ExperimentReport report;
  report.rows = std::move(rows);
  report.aggregates = summarize(report.rows);
  return report;
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "dataset,seed,algorithm,size,density,triangles,parallel_conductance,"
         "traditional_conductance,wall_ms\n";
  const auto old_precision = out.precision(10);
  for (const ReportRow& r : report.rows) {
    out << r.dataset << ',' << r.seed_label << ',' << r.algorithm << ',' << r.size << ',' << r.density
        << ',' << r.triangles << ',' << r.parallel_conductance << ',' << r.traditional_conductance << ','
        << r.wall_ms << '\n';
  }
  out.precision(old_precision);
}

void write_report_json(const ExperimentReport& report, std::ostream& out) {
  auto summary_json = [](const MetricSummary& m) {
    nlohmann::ordered_json j;
    j["mean"] = m.mean;
    j["stddev"] = m.stddev;
    return j;
  };
  nlohmann::ordered_json doc;
  doc["runs"] = report.rows.size();
  nlohmann::ordered_json aggregates = nlohmann::ordered_json::array();
  for (const AlgorithmSummary& s : report.aggregates) {
    nlohmann::ordered_json j;
    j["algorithm"] = s.algorithm;
    j["runs"] = s.runs;
    j["size"] = summary_json(s.size);
    j["density"] = summary_json(s.density);
    j["triangles"] = summary_json(s.triangles);
    j["parallel_conductance"] = summary_json(s.parallel_conductance);
    j["traditional_conductance"] = summary_json(s.traditional_conductance);
    j["wall_ms"] = summary_json(s.wall_ms);
    aggregates.push_back(std::move(j));
  }
  doc["aggregates"] = std::move(aggregates);
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

ForecastDelta forecast_experiment(const ForecastSetting& s, NodeId q, const PartitionParams& params) {
  const PartitionResult base = attripart(s.combined, q, params);
  const PartitionResult removed = attripart(s.reduced_combined, q, params);
  const PartitionResult forecast = local_forecasting(s.reduced_combined, s.attributes, q, params);

  const auto v1 = base.members.sorted();
  const auto v2 = removed.members.sorted();
  const auto v3 = forecast.members.sorted();
  const auto e1 = induced_edge_keys(s.graph, base.members);
  const auto e2 = induced_edge_keys(s.graph, removed.members);
  const auto e3 = induced_edge_keys(s.graph, forecast.members);

  ForecastDelta d;
  d.vertex_delta = static_cast<long>(symmetric_difference_size(v1, v2)) -
                   static_cast<long>(symmetric_difference_size(v1, v3));
  d.edge_delta = static_cast<long>(symmetric_difference_size(e1, e2)) -
                 static_cast<long>(symmetric_difference_size(e1, e3));
  d.baseline_size = v1.size();
  d.removed_size = v2.size();
  d.forecast_size = v3.size();
  return d;
}

ForecastDelta forecast_experiment(const StructureGraph& g, const AttributeStore& attrs, NodeId q,
                                  const PartitionParams& params, double removal_fraction,
                                  std::uint64_t rng_seed) {
  const CombinedGraph b = build_combined_graph(g, attrs);
  const StructureGraph reduced = remove_edges(g, removal_fraction, rng_seed);
  const CombinedGraph reduced_b = build_combined_graph(reduced, attrs);
  return forecast_experiment(ForecastSetting{g, attrs, b, reduced, reduced_b}, q, params);
}

ForecastSummary forecast_study(const StructureGraph& g, const AttributeStore& attrs,
                               std::size_t n_seeds, const PartitionParams& params,
                               double removal_fraction, std::uint64_t rng_seed, unsigned workers) {
  params.validate();
  const CombinedGraph b = build_combined_graph(g, attrs);
  const StructureGraph reduced = remove_edges(g, removal_fraction, rng_seed);
  const CombinedGraph reduced_b = build_combined_graph(reduced, attrs);
  const ForecastSetting setting{g, attrs, b, reduced, reduced_b};

  ForecastSummary out;
  out.seeds = sample_seeds(reduced, n_seeds, rng_seed + 1);
  out.deltas.resize(out.seeds.size());
  parallel_for(out.seeds.size(), workers,
               [&](std::size_t i) { out.deltas[i] = forecast_experiment(setting, out.seeds[i], params); });
  for (const ForecastDelta& d : out.deltas) {
    out.mean_vertex_delta += static_cast<double>(d.vertex_delta);
    out.mean_edge_delta += static_cast<double>(d.edge_delta);
  }
  if (!out.deltas.empty()) {
    out.mean_vertex_delta /= static_cast<double>(out.deltas.size());
    out.mean_edge_delta /= static_cast<double>(out.deltas.size());
  }
  return out;
}

}  // namespace richpart
