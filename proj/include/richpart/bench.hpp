#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "richpart/graph.hpp"
#include "richpart/partition.hpp"

namespace richpart {

// ---------------------------------------------------------------------------
// Partition quality metrics

/// 2 m_S / (|S| (|S| - 1)) over the induced edges. Requires |S| >= 2.
double density(const StructureGraph& g, const VertexSet& s);
/// Same, counting only the structural edges of a combined graph.
double density(const CombinedGraph& b, const VertexSet& s);

/// Sum over v in S of the triangles of the induced subgraph through v, so
/// each triangle counts three times.
std::uint64_t triangle_count(const StructureGraph& g, const VertexSet& s);

/// Number of edges of g with both endpoints in S.
std::size_t induced_edge_count(const StructureGraph& g, const VertexSet& s);

// ---------------------------------------------------------------------------
// Generators

/// Drops floor(fraction * m) edges chosen uniformly at random.
StructureGraph remove_edges(const StructureGraph& g, double fraction, std::uint64_t rng_seed);

struct SynthConfig {
  std::uint32_t blocks{10};
  std::uint32_t block_size{20};
  double p_in{0.3};
  double p_out{0.01};
  std::uint32_t tokens_per_block{10};
  std::uint32_t tokens_per_node{5};
  double noise{0.1};  // chance that a token is drawn from another block's pool
  std::uint64_t rng_seed{7};
};

struct SynthDataset {
  StructureGraph graph;
  AttributeStore attributes;
  std::vector<std::uint32_t> block_of;  // ground-truth block per node
};

/// Planted-partition graph whose node attributes are drawn mostly from a
/// per-block token pool. Deterministic per rng_seed.
SynthDataset synth_attributed_graph(const SynthConfig& config);

/// Planted partition with n ~ target_nodes and the given expected intra- and
/// inter-block degrees.
SynthConfig synth_config_for_degree(std::uint32_t target_nodes, std::uint32_t block_size,
                                    double intra_degree, double inter_degree, std::uint64_t rng_seed);

/// Barabasi-Albert graph, each new node attaching to `links` existing nodes.
StructureGraph preferential_attachment(NodeId n, std::uint32_t links, std::uint64_t rng_seed);

/// Randomly permutes which node owns which token set (null-model control).
AttributeStore shuffle_attributes(const AttributeStore& attrs, std::uint64_t rng_seed);

/// `count` distinct nodes with degree >= 1, ascending. Fewer when the graph
/// has fewer such nodes; throws when it has none.
std::vector<NodeId> sample_seeds(const StructureGraph& g, std::size_t count, std::uint64_t rng_seed);

// ---------------------------------------------------------------------------
// Experiments

struct ReportRow {
  std::string dataset;
  NodeId seed{0};
  std::string seed_label;
  std::string algorithm;
  std::size_t size{0};
  double density{0.0};  // 0 for partitions with fewer than two vertices
  std::uint64_t triangles{0};
  double parallel_conductance{0.0};
  double traditional_conductance{0.0};
  double wall_ms{0.0};
  std::vector<NodeId> members;  // sorted
};

struct MetricSummary {
  double mean{0.0};
  double stddev{0.0};
};

struct AlgorithmSummary {
  std::string algorithm;
  std::size_t runs{0};
  MetricSummary size, density, triangles, parallel_conductance, traditional_conductance, wall_ms;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;  // sorted by seed, then algorithm
  std::vector<AlgorithmSummary> aggregates;
};

struct DatasetView {
  std::string name;
  const StructureGraph& graph;
  const CombinedGraph& combined;
  const LabelMap* labels{nullptr};
};

ReportRow make_row(const DatasetView& data, const PartitionResult& result);

/// Runs AttriPart and PageRank-Nibble from `n_seeds` random non-isolated
/// seeds, on `workers` threads.
ExperimentReport compare_partitioners(const DatasetView& data, std::size_t n_seeds,
                                      const PartitionParams& params, std::uint64_t rng_seed,
                                      unsigned workers = 1);

std::vector<AlgorithmSummary> summarize(const std::vector<ReportRow>& rows);

void write_report_csv(const ExperimentReport& report, std::ostream& out);
void write_report_json(const ExperimentReport& report, std::ostream& out);

/// Improvement of forecasting over plain AttriPart on a graph with edges
/// removed, measured against AttriPart on the intact graph. Positive means
/// forecasting recovered more of the original partition.
struct ForecastDelta {
  long vertex_delta{0};
  long edge_delta{0};
  std::size_t baseline_size{0};
  std::size_t removed_size{0};
  std::size_t forecast_size{0};
};

/// Intact graph, the same graph with edges removed, and their combined
/// graphs, so many seeds can share one setup.
struct ForecastSetting {
  const StructureGraph& graph;
  const AttributeStore& attributes;
  const CombinedGraph& combined;
  const StructureGraph& reduced_graph;
  const CombinedGraph& reduced_combined;
};

/// S1 = AttriPart on the intact graph, S2 = AttriPart on the reduced graph,
/// S3 = LocalForecasting on the reduced graph.
///   vertex_delta = |S1 Δ S2| - |S1 Δ S3|
///   edge_delta   = same over the induced edge sets, taken in the intact graph
ForecastDelta forecast_experiment(const ForecastSetting& setting, NodeId q, const PartitionParams& params);

/// Convenience overload that removes `removal_fraction` of the edges itself.
ForecastDelta forecast_experiment(const StructureGraph& g, const AttributeStore& attrs, NodeId q,
                                  const PartitionParams& params, double removal_fraction,
                                  std::uint64_t rng_seed);

struct ForecastSummary {
  std::vector<NodeId> seeds;
  std::vector<ForecastDelta> deltas;
  double mean_vertex_delta{0.0};
  double mean_edge_delta{0.0};
};

/// Runs forecast_experiment from `n_seeds` seeds that keep at least one edge
/// after removal.
ForecastSummary forecast_study(const StructureGraph& g, const AttributeStore& attrs,
                               std::size_t n_seeds, const PartitionParams& params,
                               double removal_fraction, std::uint64_t rng_seed, unsigned workers = 1);

}  // namespace richpart
