#include "richpart/io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "richpart/error.hpp"

namespace richpart {

namespace {

using nlohmann::ordered_json;

std::string at_line(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// "# nodes N edges M" (extra spaces allowed). Anything else is a comment.
struct Header {
  std::size_t nodes{0};
  std::size_t edges{0};
};

std::optional<Header> parse_header(std::string_view comment) {
  std::istringstream in{std::string(comment)};
  std::string hash, nodes_kw, edges_kw;
  long long n = -1, m = -1;
  if (!(in >> hash >> nodes_kw >> n >> edges_kw >> m)) return std::nullopt;
  if (hash != "#" || nodes_kw != "nodes" || edges_kw != "edges" || n < 0 || m < 0) return std::nullopt;
  std::string rest;
  if (in >> rest) return std::nullopt;
  return Header{static_cast<std::size_t>(n), static_cast<std::size_t>(m)};
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("io", "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("io", "cannot write " + path);
  return out;
}

void check_label(const std::string& label) {
  if (label.empty() || label.front() == '#') throw invalid_argument("io", "label cannot be written: '" + label + "'");
  for (char c : label) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw invalid_argument("io", "label contains whitespace: '" + label + "'");
    }
  }
}

ordered_json number_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  std::ostringstream s;
  s << std::setprecision(10) << x;
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Edge lists

EdgeListFile read_edge_list(std::istream& in, const std::string& source) {
  EdgeListFile out;
  std::vector<Edge> edges;
  std::optional<Header> header;
  std::string line;
  std::size_t lineno = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (auto h = parse_header(body)) {
        if (header) throw data_error("io", at_line(source, lineno) + "second size header");
        header = h;
      }
      continue;
    }
    const auto fields = split_ws(body);
    if (fields.size() > 2) {
      throw data_error("io", at_line(source, lineno) + "expected 'u v', got " + std::to_string(fields.size()) +
                                 " fields");
    }
    any = true;
    const NodeId u = out.labels.intern(fields[0]);
    if (fields.size() == 2) edges.push_back({u, out.labels.intern(fields[1])});
  }
  if (in.bad()) throw data_error("io", source + ": read failed");
  if (!any) throw data_error("io", source + ": no edges or nodes");
  out.lines = lineno;
  out.graph = StructureGraph(static_cast<NodeId>(out.labels.size()), edges, &out.dropped);
  if (header && (header->nodes != out.graph.num_nodes() || header->edges != out.graph.num_edges())) {
    throw data_error("io", source + ": header says " + std::to_string(header->nodes) + " nodes and " +
                               std::to_string(header->edges) + " edges, file has " +
                               std::to_string(out.graph.num_nodes()) + " and " +
                               std::to_string(out.graph.num_edges()));
  }
  return out;
}

EdgeListFile load_edge_list(const std::string& path) {
  auto in = open_in(path);
  return read_edge_list(in, path);
}

void write_edge_list(const StructureGraph& g, const LabelMap& labels, std::ostream& out) {
  if (labels.size() != g.num_nodes()) throw invalid_argument("io", "label map does not match the graph");
  out << "# nodes " << g.num_nodes() << " edges " << g.num_edges() << "\n";
  // Each edge is written at its larger endpoint, so labels first appear in
  // id order and a reload assigns the same ids. A node with no smaller
  // neighbor gets a declaration line of its own.
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const std::string& lv = labels.label(v);
    check_label(lv);
    auto nb = g.neighbors(v);
    if (nb.empty() || nb.front() > v) out << lv << "\n";
    for (NodeId u : nb) {
      if (u >= v) break;
      out << labels.label(u) << " " << lv << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Attributes

std::string escape_token(const std::string& token) {
  std::string out;
  for (char c : token) {
    if (c == '%') out += "%25";
    else if (c == ',') out += "%2C";
    else if (c == '\t') out += "%09";
    else if (c == '\n') out += "%0A";
    else if (c == '\r') out += "%0D";
    else out += c;
  }
  return out;
}

std::string unescape_token(const std::string& token) {
  std::string out;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] == '%' && i + 2 < token.size() && std::isxdigit(static_cast<unsigned char>(token[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(token[i + 2]))) {
      out += static_cast<char>(std::stoi(token.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += token[i];
    }
  }
  return out;
}

AttributeStore read_attributes(std::istream& in, const LabelMap& labels, const std::string& source) {
  AttributeStore attrs(static_cast<NodeId>(labels.size()));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;

    const std::size_t tab = line.find('\t');
    const std::string label(trim(std::string_view(line).substr(0, tab)));
    const auto v = labels.find(label);
    if (!v) throw data_error("io", at_line(source, lineno) + "unknown node '" + label + "'");
    if (tab == std::string::npos) continue;

    std::string_view rest = std::string_view(line).substr(tab + 1);
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string_view raw = trim(rest.substr(0, comma));
      if (!raw.empty()) attrs.add_token(*v, unescape_token(std::string(raw)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  if (in.bad()) throw data_error("io", source + ": read failed");
  return attrs;
}

AttributeStore load_attributes(const std::string& path, const LabelMap& labels) {
  auto in = open_in(path);
  return read_attributes(in, labels, path);
}

void write_attributes(const AttributeStore& attrs, const LabelMap& labels, std::ostream& out) {
  if (labels.size() != attrs.num_nodes()) throw invalid_argument("io", "label map does not match the attributes");
  for (NodeId v = 0; v < attrs.num_nodes(); ++v) {
    if (attrs.tokens(v).empty()) continue;
    check_label(labels.label(v));
    out << labels.label(v) << '\t';
    bool first = true;
    for (const std::string& t : attrs.token_labels(v)) {
      if (!first) out << ',';
      out << escape_token(t);
      first = false;
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Datasets

DatasetBundle load_dataset(const std::string& name, const std::string& edges_path,
                           const std::string& attrs_path) {
  EdgeListFile file = load_edge_list(edges_path);
  DatasetBundle data;
  data.name = name;
  data.labels = std::move(file.labels);
  data.graph = std::move(file.graph);
  data.dropped = file.dropped;
  data.attributes = attrs_path.empty() ? AttributeStore(data.graph.num_nodes())
                                       : load_attributes(attrs_path, data.labels);
  return data;
}

void save_dataset(const DatasetBundle& data, const std::string& edges_path, const std::string& attrs_path) {
  {
    auto out = open_out(edges_path);
    write_edge_list(data.graph, data.labels, out);
    if (!out) throw data_error("io", "write failed: " + edges_path);
  }
  if (!attrs_path.empty()) {
    auto out = open_out(attrs_path);
    write_attributes(data.attributes, data.labels, out);
    if (!out) throw data_error("io", "write failed: " + attrs_path);
  }
}

// ---------------------------------------------------------------------------
// Partitions

OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  if (name == "text") return OutputFormat::text;
  throw invalid_argument("io", "unknown format '" + name + "'");
}

PartitionParams interface_defaults() {
  PartitionParams p;
  p.phi_o = 0.2;
  return p;
}

ordered_json params_to_json(const PartitionParams& p) {
  ordered_json j;
  j["phi"] = p.phi_o;
  j["alpha_n"] = p.alpha_n;
  j["alpha_r"] = p.alpha_r;
  j["ts"] = p.t_s;
  j["te"] = p.t_e;
  j["nw"] = p.n_w;
  j["ns"] = p.n_s;
  j["epsilon_t"] = p.epsilon_t;
  j["c1"] = p.c1;
  j["rng"] = p.rng_seed;
  return j;
}

ordered_json partition_to_json(const PartitionResult& r, const LabelMap& labels) {
  if (r.trace.empty()) throw invalid_argument("io", "partition has an empty sweep trace");
  auto label = [&](NodeId v) {
    if (v >= labels.size()) throw invalid_argument("io", "node id without label");
    return labels.label(v);
  };
  ordered_json j;
  j["seed"] = label(r.seed);
  ordered_json members = ordered_json::array();
  for (NodeId v : r.members) members.push_back(label(v));
  j["members"] = std::move(members);
  j["parallel_conductance"] = number_or_null(r.parallel_conductance);
  j["traditional_conductance"] = number_or_null(r.traditional_conductance);
  j["met_target"] = r.met_target;
  ordered_json trace = ordered_json::array();
  for (const SweepPoint& p : r.trace) trace.push_back({{"size", p.prefix_size}, {"conductance", p.conductance}});
  j["sweep_trace"] = std::move(trace);
  ordered_json timings = ordered_json::object();
  for (const auto& [phase, ms] : r.timings_ms) timings[phase] = ms;
  j["timings_ms"] = std::move(timings);
  j["params"] = params_to_json(r.params);
  j["algorithm"] = r.algorithm;
  j["predicted"] = r.predicted;
  j["sweep_position"] = r.sweep_position;
  j["subgraph"] = {{"nodes", r.subgraph_nodes}, {"edges", r.subgraph_edges}};
  ordered_json predicted = ordered_json::array();
  for (const WeightedEdge& e : r.predicted_edges) {
    predicted.push_back({{"u", label(e.u)}, {"v", label(e.v)}, {"weight", e.weight}});
  }
  j["predicted_edges"] = std::move(predicted);
  return j;
}

void write_partition(const PartitionResult& r, const LabelMap& labels, OutputFormat format, std::ostream& out) {
  const ordered_json j = partition_to_json(r, labels);  // validates before anything is written
  switch (format) {
    case OutputFormat::json:
      out << j.dump(2) << "\n";
      break;
    case OutputFormat::csv:
      out << "metric,value\n";
      out << "algorithm," << r.algorithm << "\n";
      out << "seed," << csv_field(labels.label(r.seed)) << "\n";
      out << "size," << r.members.size() << "\n";
      out << "parallel_conductance," << fmt(r.parallel_conductance) << "\n";
      out << "traditional_conductance," << fmt(r.traditional_conductance) << "\n";
      out << "met_target," << (r.met_target ? "true" : "false") << "\n";
      out << "\nmember\n";
      for (NodeId v : r.members) out << csv_field(labels.label(v)) << "\n";
      break;
    case OutputFormat::text:
      out << r.algorithm << " from " << labels.label(r.seed) << ": " << r.members.size() << " members\n";
      out << "  parallel conductance    " << fmt(r.parallel_conductance) << "\n";
      out << "  traditional conductance " << fmt(r.traditional_conductance) << "\n";
      out << "  target met              " << (r.met_target ? "yes" : "no") << "\n";
      out << "  subgraph                " << r.subgraph_nodes << " nodes, " << r.subgraph_edges << " edges\n";
      if (r.predicted) out << "  predicted edges         " << r.predicted_edges.size() << "\n";
      out << "  members:";
      for (NodeId v : r.members) out << " " << labels.label(v);
      out << "\n";
      break;
  }
}

void save_partition(const PartitionResult& r, const LabelMap& labels, const std::string& path,
                    OutputFormat format) {
  std::ostringstream buffer;
  write_partition(r, labels, format, buffer);
  auto out = open_out(path);
  out << buffer.str();
  if (!out) throw data_error("io", "write failed: " + path);
}

SavedPartition read_partition(std::istream& in, const std::string& source) {
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw data_error("io", source + ": " + e.what());
  }
  try {
    SavedPartition p;
    p.algorithm = j.value("algorithm", "");
    p.seed = j.at("seed").get<std::string>();
    p.members = j.at("members").get<std::vector<std::string>>();
    p.parallel_conductance = j.at("parallel_conductance").is_null()
                                 ? std::nan("")
                                 : j.at("parallel_conductance").get<double>();
    if (!j.at("traditional_conductance").is_null()) {
      p.traditional_conductance = j.at("traditional_conductance").get<double>();
    }
    p.met_target = j.at("met_target").get<bool>();
    for (const auto& point : j.at("sweep_trace")) {
      p.trace.push_back({point.at("size").get<std::size_t>(), point.at("conductance").get<double>()});
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw data_error("io", source + ": not a saved partition: " + e.what());
  }
}

SavedPartition load_partition(const std::string& path) {
  auto in = open_in(path);
  return read_partition(in, path);
}

}  // namespace richpart
