#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "richpart/graph.hpp"
#include "richpart/partition.hpp"

namespace richpart {

// ---------------------------------------------------------------------------
// Edge lists
//
//   # nodes 4 edges 3        optional header, checked against the result
//   alice bob                one undirected edge per line
//   carol                    a lone label declares an isolated node
//
// Labels are interned in first-appearance order. Self-loops and duplicate
// edges are dropped and counted.

struct EdgeListFile {
  LabelMap labels;
  StructureGraph graph;
  EdgeListStats dropped;
  std::size_t lines{0};
};

EdgeListFile read_edge_list(std::istream& in, const std::string& source = "<stream>");
EdgeListFile load_edge_list(const std::string& path);

void write_edge_list(const StructureGraph& g, const LabelMap& labels, std::ostream& out);

// ---------------------------------------------------------------------------
// Attribute files
//
//   alice<TAB>rock,jazz
//
// Commas and percent signs inside tokens are written as %2C and %25. Nodes
// missing from the file get an empty token set. Repeated lines for a node
// add to its set.

AttributeStore read_attributes(std::istream& in, const LabelMap& labels,
                               const std::string& source = "<stream>");
AttributeStore load_attributes(const std::string& path, const LabelMap& labels);

void write_attributes(const AttributeStore& attrs, const LabelMap& labels, std::ostream& out);

std::string escape_token(const std::string& token);
std::string unescape_token(const std::string& token);

// ---------------------------------------------------------------------------
// Datasets

struct DatasetBundle {
  std::string name;
  LabelMap labels;
  StructureGraph graph;
  AttributeStore attributes;
  EdgeListStats dropped;
};

/// Loads an edge list and, when attrs_path is non-empty, its attribute file.
DatasetBundle load_dataset(const std::string& name, const std::string& edges_path,
                           const std::string& attrs_path);

void save_dataset(const DatasetBundle& data, const std::string& edges_path, const std::string& attrs_path);

// ---------------------------------------------------------------------------
// Partitions

enum class OutputFormat { json, csv, text };

/// "json", "csv" or "text".
OutputFormat parse_format(const std::string& name);

/// Defaults of the CLI and the HTTP API. Same as PartitionParams except for
/// the target conductance, 0.2 rather than 0.05.
PartitionParams interface_defaults();

/// Parameters under the names the CLI and HTTP API accept.
nlohmann::ordered_json params_to_json(const PartitionParams& params);

/// Keys, in order: seed, members, parallel_conductance,
/// traditional_conductance, met_target, sweep_trace, timings_ms, params,
/// then algorithm, predicted, sweep_position, subgraph and predicted_edges.
/// Undefined conductances are written as null. Throws on an empty trace.
nlohmann::ordered_json partition_to_json(const PartitionResult& result, const LabelMap& labels);

void write_partition(const PartitionResult& result, const LabelMap& labels, OutputFormat format,
                     std::ostream& out);
void save_partition(const PartitionResult& result, const LabelMap& labels, const std::string& path,
                    OutputFormat format);

/// What a saved JSON partition holds, with nodes as labels.
struct SavedPartition {
  std::string algorithm;
  std::string seed;
  std::vector<std::string> members;
  double parallel_conductance{0.0};
  std::optional<double> traditional_conductance;
  bool met_target{false};
  SweepTrace trace;
};

SavedPartition read_partition(std::istream& in, const std::string& source = "<stream>");
SavedPartition load_partition(const std::string& path);

}  // namespace richpart
