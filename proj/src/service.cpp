#include "richpart/service.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <utility>

#include <httplib.h>

#include "richpart/error.hpp"
#include "richpart/forecast.hpp"
#include "richpart/partition.hpp"
#include "richpart/proximity.hpp"

namespace richpart {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Thrown inside handlers; carries the status straight to the response.
struct HttpError {
  int status;
  std::string stage;
  std::string message;
};

ServiceResponse reply(int status, const ordered_json& body) { return {status, body.dump()}; }

ServiceResponse error_reply(int status, const std::string& stage, const std::string& message) {
  ordered_json j;
  j["error"] = message;
  j["stage"] = stage;
  return reply(status, j);
}

// '+' means a space only in query strings.
std::string percent_decode(std::string_view s, bool query = false) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (query && s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) parts.push_back(percent_decode(path.substr(i, j - i)));
    i = j;
  }
  return parts;
}

std::map<std::string, std::string> parse_query(std::string_view q) {
  std::map<std::string, std::string> out;
  while (!q.empty()) {
    const std::size_t amp = q.find('&');
    const std::string_view pair = q.substr(0, amp);
    const std::size_t eq = pair.find('=');
    if (!pair.empty()) {
      out[percent_decode(pair.substr(0, eq), true)] =
          eq == std::string_view::npos ? "" : percent_decode(pair.substr(eq + 1), true);
    }
    if (amp == std::string_view::npos) break;
    q.remove_prefix(amp + 1);
  }
  return out;
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw HttpError{422, "request", std::string("body is not JSON: ") + e.what()};
  }
  if (!j.is_object()) throw HttpError{422, "request", "body must be a JSON object"};
  return j;
}

double number_field(const json& j, const char* key) {
  if (!j.is_number()) throw HttpError{422, "params", std::string(key) + " must be a number"};
  return j.get<double>();
}

std::uint64_t count_field(const json& j, const char* key) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw HttpError{422, "params", std::string(key) + " must be an integer"};
  }
  if (j.is_number_integer() && j.get<std::int64_t>() < 0) {
    throw HttpError{422, "params", std::string(key) + " must be non-negative"};
  }
  return j.get<std::uint64_t>();
}

// Overlays request fields onto the interface defaults. Only the keys in
// `allowed` (plus "seed") are accepted.
PartitionParams parse_params(const json& body, const std::set<std::string>& allowed) {
  PartitionParams p = interface_defaults();
  for (const auto& [key, value] : body.items()) {
    if (key == "seed") continue;
    if (!allowed.count(key)) throw HttpError{422, "params", "unknown parameter '" + key + "'"};
    if (key == "phi") p.phi_o = number_field(value, "phi");
    else if (key == "alpha_n") p.alpha_n = number_field(value, "alpha_n");
    else if (key == "alpha_r") p.alpha_r = number_field(value, "alpha_r");
    else if (key == "ts") p.t_s = number_field(value, "ts");
    else if (key == "te") p.t_e = number_field(value, "te");
    else if (key == "epsilon_t") p.epsilon_t = number_field(value, "epsilon_t");
    else if (key == "nw") {
      const auto nw = count_field(value, "nw");
      if (nw > UINT32_MAX) throw HttpError{422, "params", "nw is too large"};
      p.n_w = static_cast<std::uint32_t>(nw);
    } else if (key == "ns") p.n_s = count_field(value, "ns");
    else if (key == "rng") p.rng_seed = count_field(value, "rng");
  }
  p.validate();
  return p;
}

NodeId parse_seed(const json& body, const GraphSession& s) {
  if (!body.contains("seed")) throw HttpError{422, "seed", "missing seed"};
  const json& seed = body["seed"];
  std::string label;
  if (seed.is_string()) label = seed.get<std::string>();
  else if (seed.is_number_integer() || seed.is_number_unsigned()) label = seed.dump();
  else throw HttpError{422, "seed", "seed must be a node label"};
  const auto id = s.data.labels.find(label);
  if (!id) throw HttpError{422, "seed", "unknown node '" + label + "'"};
  return *id;
}

ordered_json proximity_params_json(const PartitionParams& p) {
  ordered_json j;
  j["alpha_r"] = p.alpha_r;
  j["nw"] = p.n_w;
  j["ts"] = p.t_s;
  j["rng"] = p.rng_seed;
  return j;
}

// Nodes and edges of a subgraph for drawing. Every node is listed; edges are
// capped, so the payload stays self-consistent when truncated.
ordered_json render(const Subgraph& t, const GraphSession& s, const std::vector<std::uint32_t>* counts,
                    const VertexSet* members, std::size_t max_edges) {
  ordered_json nodes = ordered_json::array();
  for (NodeId local = 0; local < t.size(); ++local) {
    const NodeId v = t.parent_id(local);
    ordered_json n;
    n["label"] = s.data.labels.label(v);
    n["degree"] = s.data.graph.degree(v);
    if (members) n["in_partition"] = members->contains(v);
    if (counts) n["walk_count"] = (*counts)[v];
    nodes.push_back(std::move(n));
  }
  ordered_json edges = ordered_json::array();
  std::size_t total = 0;
  for (const WeightedEdge& e : t.graph.edges()) {
    ++total;
    if (edges.size() >= max_edges) continue;
    edges.push_back({{"u", s.data.labels.label(t.parent_id(e.u))},
                     {"v", s.data.labels.label(t.parent_id(e.v))},
                     {"weight", e.weight},
                     {"structural", e.structural}});
  }
  ordered_json j;
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  j["total_edges"] = total;
  j["truncated"] = total > max_edges;
  return j;
}

}  // namespace

std::shared_ptr<const GraphSession> make_session(std::string id, DatasetBundle data) {
  auto s = std::make_shared<GraphSession>();
  s->id = std::move(id);
  s->combined = build_combined_graph(data.graph, data.attributes);
  s->data = std::move(data);
  s->created = std::chrono::system_clock::now();
  return s;
}

struct Service::Impl {
  httplib::Server server;
};

Service::Service(std::vector<std::shared_ptr<const GraphSession>> sessions, ServiceOptions options)
    : options_(std::move(options)), impl_(std::make_shared<Impl>()) {
  for (auto& s : sessions) {
    if (!s) throw invalid_argument("service", "null session");
    if (!sessions_.emplace(s->id, s).second) throw invalid_argument("service", "duplicate graph id '" + s->id + "'");
  }
}

ServiceResponse Service::handle(const std::string& method, const std::string& target, const std::string& body) const {
  const std::size_t qmark = target.find('?');
  const auto parts = split_path(std::string_view(target).substr(0, qmark));
  const auto query = qmark == std::string::npos ? std::map<std::string, std::string>{}
                                                : parse_query(std::string_view(target).substr(qmark + 1));
  try {
    if (method == "OPTIONS") return {204, ""};
    if (parts.empty() || parts[0] != "graphs" || parts.size() > 3 || parts.size() == 2) {
      throw HttpError{404, "route", "no such endpoint"};
    }

    if (parts.size() == 1) {
      if (method != "GET") throw HttpError{405, "route", "use GET"};
      ordered_json list = ordered_json::array();
      for (const auto& [id, s] : sessions_) {
        list.push_back({{"id", id}, {"n", s->data.graph.num_nodes()}, {"m", s->data.graph.num_edges()},
                        {"name", s->data.name}});
      }
      return reply(200, list);
    }

    auto it = sessions_.find(parts[1]);
    if (it == sessions_.end()) throw HttpError{404, "graph", "unknown graph '" + parts[1] + "'"};
    const GraphSession& s = *it->second;
    const std::string& action = parts[2];

    if (action == "node") {
      if (method != "GET") throw HttpError{405, "route", "use GET"};
      auto label = query.find("label");
      if (label == query.end()) throw HttpError{422, "node", "missing label"};
      const auto v = s.data.labels.find(label->second);
      if (!v) throw HttpError{404, "node", "unknown node '" + label->second + "'"};
      ordered_json j;
      j["graph"] = s.id;
      j["label"] = label->second;
      j["id"] = *v;
      j["degree"] = s.data.graph.degree(*v);
      j["weighted_degree"] = s.combined.weighted_degree(*v);
      j["tokens"] = s.data.attributes.token_labels(*v);
      return reply(200, j);
    }

    if (action != "partition" && action != "forecast" && action != "proximity") {
      throw HttpError{404, "route", "no such endpoint"};
    }
    if (method != "POST") throw HttpError{405, "route", "use POST"};
    const json req = parse_body(body);

    if (action == "proximity") {
      const PartitionParams p = parse_params(req, {"alpha_r", "nw", "ts", "rng"});
      const NodeId q = parse_seed(req, s);
      WalkCounts walks;
      const Subgraph t = local_proximity(s.combined, q, p.proximity(), walks);
      ordered_json j;
      j["graph"] = s.id;
      j["params"] = proximity_params_json(p);
      j["seed"] = s.data.labels.label(q);
      j["mean"] = walks.mean;
      j["stddev"] = walks.stddev;
      j["threshold"] = relevance_threshold(walks, p.t_s);
      j["subgraph"] = render(t, s, &walks.counts, nullptr, options_.max_render_edges);
      return reply(200, j);
    }

    std::set<std::string> allowed{"phi", "alpha_n", "alpha_r", "ts", "nw", "ns", "rng", "epsilon_t"};
    if (action == "forecast") allowed.insert("te");
    const PartitionParams p = parse_params(req, allowed);
    const NodeId q = parse_seed(req, s);
    const AttriPartRun run = action == "forecast" ? run_local_forecasting(s.combined, s.data.attributes, q, p)
                                                  : run_attripart(s.combined, q, p);
    ordered_json j;
    j["graph"] = s.id;
    j["params"] = params_to_json(p);
    if (action == "partition") j["params"].erase("te");
    j["result"] = partition_to_json(run.result, s.data.labels);
    j["subgraph"] = render(run.subgraph, s, nullptr, &run.result.members, options_.max_render_edges);
    if (action == "forecast") j["predicted_edges"] = j["result"]["predicted_edges"];
    return reply(200, j);
  } catch (const HttpError& e) {
    return error_reply(e.status, e.stage, e.message);
  } catch (const Error& e) {
    return error_reply(e.kind() == ErrorKind::algorithm ? 500 : 422, e.stage(), e.message());
  } catch (const std::exception& e) {
    return error_reply(500, "service", e.what());
  }
}

bool Service::run() {
  httplib::Server& svr = impl_->server;
  const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    const ServiceResponse r = handle(req.method, req.target, req.body);
    res.status = r.status;
    if (!r.body.empty()) res.set_content(r.body, "application/json");
  };
  svr.Get(".*", dispatch);
  svr.Post(".*", dispatch);
  svr.Options(".*", dispatch);
  svr.Put(".*", dispatch);
  svr.Delete(".*", dispatch);
  svr.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", options_.cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  svr.set_read_timeout(options_.request_timeout);
  svr.set_write_timeout(options_.request_timeout);

  const int port = options_.port == 0 ? svr.bind_to_any_port(options_.host)
                                      : (svr.bind_to_port(options_.host, options_.port) ? options_.port : -1);
  if (port < 0) return false;
  bound_port_ = port;
  return svr.listen_after_bind();
}

void Service::stop() { impl_->server.stop(); }

bool Service::is_running() const { return impl_->server.is_running(); }

}  // namespace richpart
