#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace richpart {

/// Dense node index in [0, n).
using NodeId = std::uint32_t;
/// Interned attribute token.
using TokenId = std::uint32_t;

/// Weight given to a structural edge whose endpoints share no attribute.
inline constexpr double kDefaultAttributeSimilarity = 0.05;

/// Bijection between external node labels and dense ids, assigned in
/// first-appearance order.
class LabelMap {
 public:
  LabelMap() = default;

  /// Labels "0", "1", ..., "n-1".
  static LabelMap numbered(NodeId n);

  NodeId intern(std::string_view label);
  std::optional<NodeId> find(std::string_view label) const;
  const std::string& label(NodeId id) const { return labels_.at(id); }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

struct Edge {
  NodeId u{0};
  NodeId v{0};
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct EdgeListStats {
  std::size_t self_loops{0};
  std::size_t duplicates{0};
};

/// Undirected, unweighted structure graph in CSR form. Neighbor lists are
/// sorted, symmetric, and free of self-loops and duplicates.
class StructureGraph {
 public:
  StructureGraph() = default;

  /// Builds from an arbitrary edge list. Self-loops and duplicate edges
  /// (in either orientation) are dropped and tallied in `stats`.
  StructureGraph(NodeId n, std::span<const Edge> edges, EdgeListStats* stats = nullptr);

  NodeId num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return m_; }
  std::size_t volume() const noexcept { return 2 * m_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  /// Every edge once, as (u < v), in lexicographic order.
  std::vector<Edge> edges() const;

 private:
  NodeId n_{0};
  std::size_t m_{0};
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
};

/// Per-node attribute token sets. Sets are stored as sorted, deduplicated
/// vectors of interned token ids.
class AttributeStore {
 public:
  AttributeStore() = default;
  explicit AttributeStore(NodeId n) : sets_(n) {}

  TokenId intern(std::string_view token);
  void add_token(NodeId v, std::string_view token);
  void add_token(NodeId v, TokenId token);
  void clear(NodeId v) { sets_.at(v).clear(); }

  NodeId num_nodes() const noexcept { return static_cast<NodeId>(sets_.size()); }
  std::size_t vocabulary_size() const noexcept { return vocab_.size(); }

  std::span<const TokenId> tokens(NodeId v) const { return sets_.at(v); }
  const std::string& token_label(TokenId t) const { return vocab_.at(t); }
  std::vector<std::string> token_labels(NodeId v) const;

  /// Jaccard similarity of the two nodes' token sets.
  double similarity(NodeId u, NodeId v) const;

 private:
  std::vector<std::vector<TokenId>> sets_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> index_;
};

/// |a ∩ b| / |a ∪ b| over sorted unique ranges; 0 when both are empty.
double jaccard(std::span<const TokenId> a, std::span<const TokenId> b);

struct WeightedEdge {
  NodeId u{0};
  NodeId v{0};
  double weight{0.0};
  bool structural{false};
};

/// Undirected weighted graph combining structural and attribute edges.
/// Each adjacency entry records its weight and whether the edge is present
/// in the structure graph. Immutable after construction.
class CombinedGraph {
 public:
  CombinedGraph() = default;

  /// Each undirected edge must appear once. Throws on self-loops, duplicate
  /// pairs, out-of-range endpoints or non-positive weights.
  CombinedGraph(NodeId n, std::span<const WeightedEdge> edges);

  NodeId num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return m_; }
  std::size_t num_structural_edges() const noexcept { return structural_m_; }
  double total_volume() const noexcept { return total_volume_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> weights(NodeId v) const {
    return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const std::uint8_t> structural_flags(NodeId v) const {
    return {structural_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  double weighted_degree(NodeId v) const { return weighted_degree_[v]; }
  std::size_t structural_degree(NodeId v) const { return structural_degree_[v]; }

  /// Weight of (u, v), or nullopt when absent.
  std::optional<double> weight(NodeId u, NodeId v) const;
  bool is_structural(NodeId u, NodeId v) const;

  /// Picks a neighbor of v with probability proportional to edge weight;
  /// `unit` is a uniform draw in [0, 1). v must have at least one edge.
  NodeId sample_neighbor(NodeId v, double unit) const {
    const Arc* first = arcs_.data() + offsets_[v];
    const Arc* last = arcs_.data() + offsets_[v + 1];
    // The last running sum is the degree.
    const double target = unit * last[-1].cumulative;
    const Arc* it = std::upper_bound(first, last, target,
                                     [](double x, const Arc& a) { return x < a.cumulative; });
    if (it == last) --it;  // unit * degree rounded up to the full degree
    return it->target;
  }

  /// Cache hint for an upcoming sample_neighbor(v).
  void prefetch(NodeId v) const {
    __builtin_prefetch(offsets_.data() + v);
    __builtin_prefetch(arcs_.data() + offsets_[v]);
  }

  /// Every edge once, as (u < v), in lexicographic order.
  std::vector<WeightedEdge> edges() const;

 private:
  NodeId n_{0};
  std::size_t m_{0};
  std::size_t structural_m_{0};
  double total_volume_{0.0};
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<double> weights_;
  std::vector<std::uint8_t> structural_;
  // Running weight sums next to their targets, for sampling.
  struct Arc {
    double cumulative;
    NodeId target;
  };
  std::vector<Arc> arcs_;
  std::vector<double> weighted_degree_;
  std::vector<std::size_t> structural_degree_;
};

/// Vertex set that remembers insertion order.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<NodeId> nodes);
  explicit VertexSet(std::span<const NodeId> nodes);

  /// Returns false when v is already a member.
  bool insert(NodeId v);
  bool contains(NodeId v) const { return index_.contains(v); }
  std::size_t size() const noexcept { return order_.size(); }
  bool empty() const noexcept { return order_.empty(); }

  std::span<const NodeId> members() const noexcept { return order_; }
  auto begin() const noexcept { return order_.begin(); }
  auto end() const noexcept { return order_.end(); }

  /// Members in ascending id order.
  std::vector<NodeId> sorted() const;

 private:
  std::vector<NodeId> order_;
  std::unordered_set<NodeId> index_;
};

/// Attribute-graph weight of the pair (u, v):
///   structural edge, J > 0      -> J
///   structural edge, J = 0      -> 0.05
///   non-edge,        J > t_e    -> J
///   otherwise                   -> 0
double build_attribute_weight(const StructureGraph& g, const AttributeStore& attrs, NodeId u,
                              NodeId v, double t_e);

/// Combined graph over the structural edge set, each weighted 1 + A(u, v).
/// Attribute-only edges are never materialized globally; see
/// expanded_neighborhood for their subgraph-local counterpart.
CombinedGraph build_combined_graph(const StructureGraph& g, const AttributeStore& attrs);

double weighted_degree(const CombinedGraph& b, NodeId v);
double volume(const CombinedGraph& b, const VertexSet& s);

}  // namespace richpart
