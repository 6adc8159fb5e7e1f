#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "mindelay/topology.hpp"

namespace mindelay {

// Candidate next hops and traversal orders for one group of objects that
// share a source set. Arcs are stored flat: node i owns slots
// [arc_offset[i], arc_offset[i+1]) of arc_to/arc_link, sorted by neighbor id.
struct RoutingSlice {
  std::vector<int> sources;       // dense indices, sorted
  std::vector<int> hop_distance;  // per node; kUnreachable when cut off
  std::vector<int> arc_offset;    // size N+1
  std::vector<int> arc_to;
  std::vector<int> arc_link;
  std::vector<int> link_to_arc;   // per graph link: flat slot or -1

  // Arcs always point "down" the key (hop_distance, -node), so a sweep in
  // traffic_order sees every upstream node before its next hops and
  // marginal_order is the exact reverse.
  std::vector<int> traffic_order;
  std::vector<int> marginal_order;
  // per node: (from, flat slot) pairs in traffic_order of `from`, so a gather
  // over them adds contributions in the same order a forward push would
  std::vector<std::vector<std::pair<int, int>>> in_arcs;

  static constexpr int kUnreachable = 1 << 29;

  int node_count() const { return static_cast<int>(arc_offset.size()) - 1; }
  int arc_count(int node) const { return arc_offset[node + 1] - arc_offset[node]; }
  bool is_source(int node) const;
};

struct RoutingGraph {
  std::vector<int> slice_of_object;
  std::vector<RoutingSlice> slices;
  std::vector<std::size_t> phi_offset;  // size K+1; flat layout of phi vectors

  const RoutingSlice& slice(int object) const {
    return slices[slice_of_object[object]];
  }
  std::size_t phi_size() const { return phi_offset.back(); }
};

// Multipath FIB over shortest-path distances to the object's sources.
// j qualifies as a next hop of i when d(j) < d(i), or d(j) == d(i) with
// j's id above i's; the tie side keeps sideways arcs usable while the key
// (d, -id) still decreases strictly, so routes cannot loop. Only links whose
// reverse direction exists participate: responses retrace the request path.
RoutingGraph build_fib(const NetworkGraph& graph);

// Contiguous per-(object, next hop) slots for one node across all slices, so
// per-node tables (pending counts, rtt averages, marginal estimates) can live
// in flat vectors. slot() maps an object plus its slice-flat arc id.
struct NodeArcIndex {
  int node = -1;
  std::vector<int> offset;    // size K+1
  std::vector<int> base_arc;  // per object: node's first flat arc in its slice

  void build(const RoutingGraph& r, int node, int catalog);
  int slots() const { return offset.back(); }
  int count(int object) const { return offset[object + 1] - offset[object]; }
  int slot(int object, int flat_arc) const {
    return offset[object] + (flat_arc - base_arc[object]);
  }
};

}  // namespace mindelay
