#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "richpart/graph.hpp"
#include "richpart/io.hpp"

namespace richpart {

/// A loaded dataset and its combined graph. Never modified after creation,
/// so request threads share it freely.
struct GraphSession {
  std::string id;
  DatasetBundle data;
  CombinedGraph combined;
  std::chrono::system_clock::time_point created;
};

std::shared_ptr<const GraphSession> make_session(std::string id, DatasetBundle data);

struct ServiceOptions {
  std::string host{"127.0.0.1"};
  int port{8080};
  std::chrono::seconds request_timeout{60};
  std::string cors_origin{"*"};
  std::size_t max_render_edges{2000};
};

struct ServiceResponse {
  int status{200};
  std::string body;
};

/// JSON API over a fixed set of graph sessions.
///
///   GET  /graphs
///   GET  /graphs/{id}/node?label=...
///   POST /graphs/{id}/partition   {seed, phi, alpha_n, alpha_r, ts, nw, ns, rng, epsilon_t}
///   POST /graphs/{id}/forecast    same plus te
///   POST /graphs/{id}/proximity   {seed, alpha_r, nw, ts, rng}
///
/// Errors come back as {"error", "stage"}: 404 for unknown graphs or routes,
/// 422 for bad seeds or parameters, 500 when an algorithm stage fails.
class Service {
 public:
  Service(std::vector<std::shared_ptr<const GraphSession>> sessions, ServiceOptions options = {});

  /// Routes one request. `target` is the path with its query string.
  ServiceResponse handle(const std::string& method, const std::string& target, const std::string& body) const;

  /// Serves until stop() is called from another thread. Returns false when
  /// the socket cannot be bound. A port of 0 picks a free one.
  bool run();
  void stop();
  /// Port actually bound, once run() is listening.
  int bound_port() const noexcept { return bound_port_.load(); }
  bool is_running() const;

  const ServiceOptions& options() const noexcept { return options_; }

 private:
  struct Impl;
  std::map<std::string, std::shared_ptr<const GraphSession>> sessions_;
  ServiceOptions options_;
  std::shared_ptr<Impl> impl_;
  std::atomic<int> bound_port_{0};
};

}  // namespace richpart
