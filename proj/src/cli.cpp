#include "richpart/cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "richpart/bench.hpp"
#include "richpart/error.hpp"
#include "richpart/forecast.hpp"
#include "richpart/io.hpp"
#include "richpart/partition.hpp"
#include "richpart/proximity.hpp"
#include "richpart/service.hpp"

namespace richpart {

namespace {

using nlohmann::ordered_json;

struct Inputs {
  std::string edges;
  std::string attrs;
  std::string seed;
  std::string out;
  std::string format{"json"};
  PartitionParams params{interface_defaults()};
};

void add_dataset_flags(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--edges", in.edges, "edge list file")->required();
  cmd->add_option("--attrs", in.attrs, "attribute file");
}

void add_param_flags(CLI::App* cmd, Inputs& in, bool with_te) {
  PartitionParams& p = in.params;
  cmd->add_option("--phi", p.phi_o, "target conductance")->capture_default_str();
  cmd->add_option("--alpha-n", p.alpha_n, "PageRank teleport")->capture_default_str();
  cmd->add_option("--alpha-r", p.alpha_r, "random-walk restart")->capture_default_str();
  cmd->add_option("--ts", p.t_s, "relevance threshold")->capture_default_str();
  if (with_te) cmd->add_option("--te", p.t_e, "link-prediction threshold")->capture_default_str();
  cmd->add_option("--nw", p.n_w, "random-walk trials")->capture_default_str();
  cmd->add_option("--ns", p.n_s, "vertices to sweep")->capture_default_str();
  cmd->add_option("--epsilon-t", p.epsilon_t, "PageRank stop threshold")->capture_default_str();
  cmd->add_option("--rng", p.rng_seed, "random seed")->capture_default_str();
}

void add_output_flags(CLI::App* cmd, Inputs& in, std::vector<std::string> formats) {
  cmd->add_option("--out", in.out, "write the result here instead of stdout");
  cmd->add_option("--format", in.format, "output format")
      ->check(CLI::IsMember(std::move(formats)))
      ->capture_default_str();
}

NodeId resolve_seed(const DatasetBundle& data, const std::string& label) {
  const auto id = data.labels.find(label);
  if (!id) throw data_error("seed", "unknown node '" + label + "'");
  return *id;
}

// Writes to --out or to `out`.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw data_error("io", "cannot write " + path);
  file << text;
  if (!file) throw data_error("io", "write failed: " + path);
}

std::string partition_text(const PartitionResult& r, const LabelMap& labels, const std::string& format) {
  std::ostringstream s;
  write_partition(r, labels, parse_format(format), s);
  return s.str();
}

std::string proximity_text(const DatasetBundle& data, NodeId q, const Subgraph& t, const WalkCounts& walks,
                           const PartitionParams& p, const std::string& format) {
  std::ostringstream s;
  const double threshold = relevance_threshold(walks, p.t_s);
  if (format == "csv") {
    s << "label,walk_count\n";
    for (NodeId v : t.node_map) s << data.labels.label(v) << "," << walks.counts[v] << "\n";
  } else if (format == "text") {
    s << "subgraph around " << data.labels.label(q) << ": " << t.size() << " nodes, " << t.graph.num_edges()
      << " edges\n";
    s << "  walk counts: mean " << walks.mean << ", stddev " << walks.stddev << ", threshold " << threshold
      << "\n";
  } else {
    ordered_json j;
    j["seed"] = data.labels.label(q);
    j["params"] = {{"alpha_r", p.alpha_r}, {"nw", p.n_w}, {"ts", p.t_s}, {"rng", p.rng_seed}};
    j["mean"] = walks.mean;
    j["stddev"] = walks.stddev;
    j["threshold"] = threshold;
    ordered_json nodes = ordered_json::array();
    for (NodeId v : t.node_map) nodes.push_back({{"label", data.labels.label(v)}, {"walk_count", walks.counts[v]}});
    j["nodes"] = std::move(nodes);
    ordered_json edges = ordered_json::array();
    for (const WeightedEdge& e : t.graph.edges()) {
      edges.push_back({{"u", data.labels.label(t.parent_id(e.u))},
                       {"v", data.labels.label(t.parent_id(e.v))},
                       {"weight", e.weight}});
    }
    j["edges"] = std::move(edges);
    s << j.dump(2) << "\n";
  }
  return s.str();
}

std::string forecast_study_text(const ForecastSummary& f, const LabelMap& labels, const std::string& format) {
  std::ostringstream s;
  if (format == "csv") {
    s << "seed,vertex_delta,edge_delta,baseline_size,removed_size,forecast_size\n";
    for (std::size_t i = 0; i < f.seeds.size(); ++i) {
      const ForecastDelta& d = f.deltas[i];
      s << labels.label(f.seeds[i]) << "," << d.vertex_delta << "," << d.edge_delta << "," << d.baseline_size
        << "," << d.removed_size << "," << d.forecast_size << "\n";
    }
  } else {
    ordered_json j;
    j["seeds"] = f.seeds.size();
    j["mean_vertex_delta"] = f.mean_vertex_delta;
    j["mean_edge_delta"] = f.mean_edge_delta;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < f.seeds.size(); ++i) {
      const ForecastDelta& d = f.deltas[i];
      rows.push_back({{"seed", labels.label(f.seeds[i])},
                      {"vertex_delta", d.vertex_delta},
                      {"edge_delta", d.edge_delta},
                      {"baseline_size", d.baseline_size},
                      {"removed_size", d.removed_size},
                      {"forecast_size", d.forecast_size}});
    }
    j["rows"] = std::move(rows);
    s << j.dump(2) << "\n";
  }
  return s.str();
}

int report(const Error& e, std::ostream& err) {
  err << "richpart: " << e.stage() << ": " << e.message() << "\n";
  switch (e.kind()) {
    case ErrorKind::invalid_argument:
      return kExitUsage;
    case ErrorKind::data:
      return kExitData;
    case ErrorKind::algorithm:
      return kExitAlgorithm;
  }
  return kExitAlgorithm;
}

Service* g_running_service = nullptr;

extern "C" void stop_on_signal(int) {
  if (g_running_service) g_running_service->stop();
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attribute-aware local graph partitioning", "richpart"};
  app.require_subcommand(1);

  Inputs in;

  auto* partition = app.add_subcommand("partition", "local partition around a seed node");
  auto* baseline = app.add_subcommand("baseline", "PageRank-Nibble partition on the structure graph");
  auto* forecast = app.add_subcommand("forecast", "partition after link prediction on the local subgraph");
  for (auto* cmd : {partition, baseline, forecast}) {
    add_dataset_flags(cmd, in);
    cmd->add_option("--seed-node", in.seed, "label of the seed node")->required();
    add_param_flags(cmd, in, cmd == forecast);
    add_output_flags(cmd, in, {"json", "csv", "text"});
  }

  auto* proximity = app.add_subcommand("proximity", "relevant subgraph around a seed node");
  add_dataset_flags(proximity, in);
  proximity->add_option("--seed-node", in.seed, "label of the seed node")->required();
  proximity->add_option("--alpha-r", in.params.alpha_r, "random-walk restart")->capture_default_str();
  proximity->add_option("--ts", in.params.t_s, "relevance threshold")->capture_default_str();
  proximity->add_option("--nw", in.params.n_w, "random-walk trials")->capture_default_str();
  proximity->add_option("--rng", in.params.rng_seed, "random seed")->capture_default_str();
  add_output_flags(proximity, in, {"json", "csv", "text"});

  std::size_t n_seeds = 20;
  unsigned workers = 1;
  double removal = 0.15;
  auto* bench = app.add_subcommand("bench", "experiments over many seeds");
  bench->require_subcommand(1);
  auto* compare = bench->add_subcommand("compare", "AttriPart against PageRank-Nibble");
  auto* bench_forecast = bench->add_subcommand("forecast", "forecasting gain with edges removed");
  for (auto* cmd : {compare, bench_forecast}) {
    add_dataset_flags(cmd, in);
    add_param_flags(cmd, in, cmd == bench_forecast);
    cmd->add_option("--seeds", n_seeds, "number of random seed nodes")->capture_default_str();
    cmd->add_option("--workers", workers, "worker threads")->capture_default_str();
    add_output_flags(cmd, in, {"json", "csv"});
  }
  bench_forecast->add_option("--removal", removal, "fraction of edges removed")
      ->check(CLI::Range(0.0, 0.999))
      ->capture_default_str();

  SynthConfig synth_config;
  synth_config.rng_seed = 42;
  std::string synth_edges = "synth.edges";
  std::string synth_attrs = "synth.attrs";
  auto* synth = app.add_subcommand("synth", "write a planted-partition dataset");
  synth->add_option("--blocks", synth_config.blocks)->capture_default_str();
  synth->add_option("--block-size", synth_config.block_size)->capture_default_str();
  synth->add_option("--p-in", synth_config.p_in)->capture_default_str();
  synth->add_option("--p-out", synth_config.p_out)->capture_default_str();
  synth->add_option("--tokens-per-block", synth_config.tokens_per_block)->capture_default_str();
  synth->add_option("--tokens-per-node", synth_config.tokens_per_node)->capture_default_str();
  synth->add_option("--noise", synth_config.noise)->capture_default_str();
  synth->add_option("--rng", synth_config.rng_seed)->capture_default_str();
  synth->add_option("--edges", synth_edges, "edge list to write")->capture_default_str();
  synth->add_option("--attrs", synth_attrs, "attribute file to write")->capture_default_str();

  ServiceOptions service_options;
  std::vector<std::string> datasets;
  int timeout_s = 60;
  auto* serve = app.add_subcommand("serve", "HTTP JSON API");
  serve->add_option("--host", service_options.host)->capture_default_str();
  serve->add_option("--port", service_options.port)->capture_default_str();
  serve->add_option("--dataset", datasets, "name=edges[,attrs], repeatable")->required();
  serve->add_option("--timeout", timeout_s, "request timeout in seconds")->capture_default_str();
  serve->add_option("--cors-origin", service_options.cors_origin)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      const SynthDataset d = synth_attributed_graph(synth_config);
      DatasetBundle bundle;
      bundle.labels = LabelMap::numbered(d.graph.num_nodes());
      bundle.graph = d.graph;
      bundle.attributes = d.attributes;
      save_dataset(bundle, synth_edges, synth_attrs);
      out << "wrote " << d.graph.num_nodes() << " nodes and " << d.graph.num_edges() << " edges to " << synth_edges
          << "\n";
      out << "wrote token sets over " << d.attributes.vocabulary_size() << " tokens to " << synth_attrs << "\n";
      return kExitOk;
    }

    if (serve->parsed()) {
      std::vector<std::shared_ptr<const GraphSession>> sessions;
      for (const std::string& spec : datasets) {
        const std::size_t eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw invalid_argument("serve", "--dataset expects name=edges[,attrs], got '" + spec + "'");
        }
        const std::string name = spec.substr(0, eq);
        const std::string files = spec.substr(eq + 1);
        const std::size_t comma = files.find(',');
        const std::string edges = files.substr(0, comma);
        const std::string attrs = comma == std::string::npos ? "" : files.substr(comma + 1);
        sessions.push_back(make_session(name, load_dataset(name, edges, attrs)));
      }
      service_options.request_timeout = std::chrono::seconds(timeout_s);
      Service service(std::move(sessions), service_options);
      g_running_service = &service;
      std::signal(SIGINT, stop_on_signal);
      std::signal(SIGTERM, stop_on_signal);
      out << "serving on " << service_options.host << ":" << service_options.port << std::endl;
      const bool ok = service.run();
      g_running_service = nullptr;
      if (!ok) throw data_error("serve", "cannot listen on " + service_options.host + ":" +
                                             std::to_string(service_options.port));
      return kExitOk;
    }

    in.params.walk_workers = 1;
    in.params.validate();
    const DatasetBundle data = load_dataset(in.edges, in.edges, in.attrs);
    if (data.dropped.self_loops + data.dropped.duplicates > 0) {
      err << "richpart: warning: dropped " << data.dropped.self_loops << " self-loops and "
          << data.dropped.duplicates << " duplicate edges\n";
    }
    const CombinedGraph b = build_combined_graph(data.graph, data.attributes);

    if (partition->parsed() || baseline->parsed() || forecast->parsed()) {
      const NodeId q = resolve_seed(data, in.seed);
      PartitionResult r;
      if (partition->parsed()) r = attripart(b, q, in.params);
      else if (baseline->parsed()) r = pagerank_nibble(data.graph, q, in.params, &b);
      else r = local_forecasting(b, data.attributes, q, in.params);
      emit(in.out, out, partition_text(r, data.labels, in.format));
      return kExitOk;
    }

    if (proximity->parsed()) {
      const NodeId q = resolve_seed(data, in.seed);
      WalkCounts walks;
      const Subgraph t = local_proximity(b, q, in.params.proximity(), walks);
      emit(in.out, out, proximity_text(data, q, t, walks, in.params, in.format));
      return kExitOk;
    }

    if (compare->parsed()) {
      const DatasetView view{in.edges, data.graph, b, &data.labels};
      const ExperimentReport rep = compare_partitioners(view, n_seeds, in.params, in.params.rng_seed, workers);
      std::ostringstream s;
      if (in.format == "csv") write_report_csv(rep, s);
      else write_report_json(rep, s);
      emit(in.out, out, s.str());
      return kExitOk;
    }

    if (bench_forecast->parsed()) {
      const ForecastSummary f =
          forecast_study(data.graph, data.attributes, n_seeds, in.params, removal, in.params.rng_seed, workers);
      emit(in.out, out, forecast_study_text(f, data.labels, in.format));
      return kExitOk;
    }
  } catch (const Error& e) {
    return report(e, err);
  } catch (const std::exception& e) {
    err << "richpart: " << e.what() << "\n";
    return kExitAlgorithm;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace richpart
