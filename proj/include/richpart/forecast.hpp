#pragma once

#include <cstddef>
#include <vector>

#include "richpart/graph.hpp"
#include "richpart/partition.hpp"
#include "richpart/proximity.hpp"

namespace richpart {

struct ExpansionStats {
  std::size_t pairs_examined{0};
  std::size_t edges_added{0};
};

/// Link prediction inside a subgraph: every node pair without an edge whose
/// attribute Jaccard similarity exceeds t_e (strictly) gains an
/// attribute-only edge weighted by that similarity. Existing edges, the node
/// map and boundary weights are untouched; the parent volume grows by the
/// added weight.
Subgraph expanded_neighborhood(const Subgraph& t, const AttributeStore& attrs, double t_e,
                               ExpansionStats* stats = nullptr);

/// Attribute-only edges of a subgraph, in parent ids.
std::vector<WeightedEdge> predicted_edges(const Subgraph& t);

/// LocalProximity, link prediction on the extracted subgraph, then AttriPart
/// on the densified subgraph (without a second proximity pass).
AttriPartRun run_local_forecasting(const CombinedGraph& b, const AttributeStore& attrs, NodeId q,
                                   const PartitionParams& params);

PartitionResult local_forecasting(const CombinedGraph& b, const AttributeStore& attrs, NodeId q,
                                  const PartitionParams& params);

}  // namespace richpart
