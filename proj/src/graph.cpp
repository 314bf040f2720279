#include "richpart/graph.hpp"

#include <algorithm>
#include <string>

#include "richpart/error.hpp"

namespace richpart {

LabelMap LabelMap::numbered(NodeId n) {
  LabelMap map;
  for (NodeId v = 0; v < n; ++v) map.intern(std::to_string(v));
  return map;
}

NodeId LabelMap::intern(std::string_view label) {
  auto [it, inserted] = index_.try_emplace(std::string(label), static_cast<NodeId>(labels_.size()));
  if (inserted) labels_.emplace_back(label);
  return it->second;
}

std::optional<NodeId> LabelMap::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// StructureGraph

StructureGraph::StructureGraph(NodeId n, std::span<const Edge> edges, EdgeListStats* stats)
    : n_(n) {
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  std::size_t self_loops = 0;
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) throw invalid_argument("graph", "edge endpoint out of range");
    if (e.u == e.v) {
      ++self_loops;
      continue;
    }
    canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
  }
  std::sort(canon.begin(), canon.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  auto last = std::unique(canon.begin(), canon.end());
  const std::size_t duplicates = static_cast<std::size_t>(canon.end() - last);
  canon.erase(last, canon.end());
  if (stats) {
    stats->self_loops += self_loops;
    stats->duplicates += duplicates;
  }

  m_ = canon.size();
  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : canon) {
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(n + 1, 0);
  for (NodeId v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  targets_.resize(2 * m_);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : canon) {
    targets_[fill[e.u]++] = e.v;
    targets_[fill[e.v]++] = e.u;
  }
  for (NodeId v = 0; v < n; ++v) {
    std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
  }
}

bool StructureGraph::has_edge(NodeId u, NodeId v) const {
  if (u >= n_ || v >= n_) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> StructureGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(m_);
  for (NodeId u = 0; u < n_; ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// AttributeStore

TokenId AttributeStore::intern(std::string_view token) {
  auto [it, inserted] = index_.try_emplace(std::string(token), static_cast<TokenId>(vocab_.size()));
  if (inserted) vocab_.emplace_back(token);
  return it->second;
}

void AttributeStore::add_token(NodeId v, std::string_view token) { add_token(v, intern(token)); }

void AttributeStore::add_token(NodeId v, TokenId token) {
  auto& set = sets_.at(v);
  auto it = std::lower_bound(set.begin(), set.end(), token);
  if (it == set.end() || *it != token) set.insert(it, token);
}

std::vector<std::string> AttributeStore::token_labels(NodeId v) const {
  std::vector<std::string> out;
  for (TokenId t : tokens(v)) out.push_back(vocab_[t]);
  return out;
}

double AttributeStore::similarity(NodeId u, NodeId v) const { return jaccard(tokens(u), tokens(v)); }

double jaccard(std::span<const TokenId> a, std::span<const TokenId> b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------
// CombinedGraph

CombinedGraph::CombinedGraph(NodeId n, std::span<const WeightedEdge> edges) : n_(n) {
  struct Entry {
    NodeId from;
    NodeId to;
    double weight;
    bool structural;
  };
  std::vector<Entry> entries;
  entries.reserve(2 * edges.size());
  for (const WeightedEdge& e : edges) {
    if (e.u >= n || e.v >= n) throw invalid_argument("graph", "edge endpoint out of range");
    if (e.u == e.v) throw invalid_argument("graph", "self-loop in combined graph");
    if (!(e.weight > 0.0)) throw invalid_argument("graph", "edge weight must be positive");
    entries.push_back({e.u, e.v, e.weight, e.structural});
    entries.push_back({e.v, e.u, e.weight, e.structural});
    if (e.structural) ++structural_m_;
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].from == entries[i - 1].from && entries[i].to == entries[i - 1].to) {
      throw invalid_argument("graph", "duplicate edge in combined graph");
    }
  }
  m_ = edges.size();

  offsets_.assign(n + 1, 0);
  for (const Entry& e : entries) ++offsets_[e.from + 1];
  for (NodeId v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];

  targets_.resize(entries.size());
  weights_.resize(entries.size());
  structural_.resize(entries.size());
  arcs_.resize(entries.size());
  weighted_degree_.assign(n, 0.0);
  structural_degree_.assign(n, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    targets_[k] = e.to;
    weights_[k] = e.weight;
    structural_[k] = e.structural ? 1 : 0;
    weighted_degree_[e.from] += e.weight;
    arcs_[k] = {weighted_degree_[e.from], e.to};
    if (e.structural) ++structural_degree_[e.from];
  }
  for (NodeId v = 0; v < n; ++v) total_volume_ += weighted_degree_[v];
}

std::optional<double> CombinedGraph::weight(NodeId u, NodeId v) const {
  if (u >= n_ || v >= n_) return std::nullopt;
  auto nb = neighbors(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return std::nullopt;
  return weights_[offsets_[u] + static_cast<std::size_t>(it - nb.begin())];
}

bool CombinedGraph::is_structural(NodeId u, NodeId v) const {
  if (u >= n_ || v >= n_) return false;
  auto nb = neighbors(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return false;
  return structural_[offsets_[u] + static_cast<std::size_t>(it - nb.begin())] != 0;
}

std::vector<WeightedEdge> CombinedGraph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(m_);
  for (NodeId u = 0; u < n_; ++u) {
    for (std::size_t k = offsets_[u]; k < offsets_[u + 1]; ++k) {
      if (u < targets_[k]) out.push_back({u, targets_[k], weights_[k], structural_[k] != 0});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// VertexSet

VertexSet::VertexSet(std::initializer_list<NodeId> nodes) {
  for (NodeId v : nodes) insert(v);
}

VertexSet::VertexSet(std::span<const NodeId> nodes) {
  for (NodeId v : nodes) insert(v);
}

bool VertexSet::insert(NodeId v) {
  if (!index_.insert(v).second) return false;
  order_.push_back(v);
  return true;
}

std::vector<NodeId> VertexSet::sorted() const {
  std::vector<NodeId> out = order_;
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

double build_attribute_weight(const StructureGraph& g, const AttributeStore& attrs, NodeId u,
                              NodeId v, double t_e) {
  if (u == v) throw invalid_argument("graph", "attribute weight requires u != v");
  const double j = attrs.similarity(u, v);
  if (g.has_edge(u, v)) return j > 0.0 ? j : kDefaultAttributeSimilarity;
  return j > t_e ? j : 0.0;
}

CombinedGraph build_combined_graph(const StructureGraph& g, const AttributeStore& attrs) {
  if (attrs.num_nodes() < g.num_nodes()) {
    throw invalid_argument("graph", "attribute store does not cover every node");
  }
  std::vector<WeightedEdge> weighted;
  weighted.reserve(g.num_edges());
  for (const Edge& e : g.edges()) {
    const double j = attrs.similarity(e.u, e.v);
    const double a = j > 0.0 ? j : kDefaultAttributeSimilarity;
    weighted.push_back({e.u, e.v, 1.0 + a, true});
  }
  return CombinedGraph(g.num_nodes(), weighted);
}

double weighted_degree(const CombinedGraph& b, NodeId v) {
  if (v >= b.num_nodes()) throw invalid_argument("graph", "node out of range");
  return b.weighted_degree(v);
}

double volume(const CombinedGraph& b, const VertexSet& s) {
  double total = 0.0;
  for (NodeId v : s) total += weighted_degree(b, v);
  return total;
}

}  // namespace richpart
