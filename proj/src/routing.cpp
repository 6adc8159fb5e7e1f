#include "mindelay/routing.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace mindelay {

bool RoutingSlice::is_source(int node) const {
  return std::binary_search(sources.begin(), sources.end(), node);
}

namespace {

RoutingSlice build_slice(const NetworkGraph& g, const std::vector<int>& sources) {
  const int n = g.node_count();
  RoutingSlice s;
  s.sources = sources;

  // BFS over the symmetric part of the graph only: a hop is usable when the
  // reverse direction exists to carry the response back.
  s.hop_distance.assign(n, RoutingSlice::kUnreachable);
  std::deque<int> frontier;
  for (int src : sources) {
    s.hop_distance[src] = 0;
    frontier.push_back(src);
  }
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int e : g.out_links[u]) {
      if (g.reverse_link[e] < 0) continue;
      const int v = g.links[e].to;
      if (s.hop_distance[v] > s.hop_distance[u] + 1) {
        s.hop_distance[v] = s.hop_distance[u] + 1;
        frontier.push_back(v);
      }
    }
  }

  s.arc_offset.assign(n + 1, 0);
  s.link_to_arc.assign(g.links.size(), -1);
  for (int i = 0; i < n; ++i) {
    s.arc_offset[i] = static_cast<int>(s.arc_to.size());
    if (s.is_source(i) || s.hop_distance[i] == RoutingSlice::kUnreachable)
      continue;
    // out_links are already sorted by neighbor id (construction order over
    // sorted node ids); keep that order so ties resolve to the lowest id
    std::vector<int> es = g.out_links[i];
    std::sort(es.begin(), es.end(),
              [&](int a, int b) { return g.links[a].to < g.links[b].to; });
    for (int e : es) {
      if (g.reverse_link[e] < 0) continue;
      const int j = g.links[e].to;
      const int di = s.hop_distance[i], dj = s.hop_distance[j];
      if (dj == RoutingSlice::kUnreachable) continue;
      if (dj < di || (dj == di && j > i)) {
        s.link_to_arc[e] = static_cast<int>(s.arc_to.size());
        s.arc_to.push_back(j);
        s.arc_link.push_back(e);
      }
    }
  }
  s.arc_offset[n] = static_cast<int>(s.arc_to.size());

  // sweep orders over the key (hop_distance, -node): arcs strictly decrease
  // it, so "largest key first" sees senders before receivers
  s.traffic_order.resize(n);
  std::iota(s.traffic_order.begin(), s.traffic_order.end(), 0);
  std::sort(s.traffic_order.begin(), s.traffic_order.end(), [&](int a, int b) {
    if (s.hop_distance[a] != s.hop_distance[b])
      return s.hop_distance[a] > s.hop_distance[b];
    return a < b;
  });
  s.marginal_order.assign(s.traffic_order.rbegin(), s.traffic_order.rend());

  s.in_arcs.assign(n, {});
  for (int i : s.traffic_order)
    for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a)
      s.in_arcs[s.arc_to[a]].push_back({i, a});

  return s;
}

}  // namespace

RoutingGraph build_fib(const NetworkGraph& graph) {
  RoutingGraph r;
  const int k = graph.catalog_size;
  r.slice_of_object.assign(k, -1);

  std::map<std::vector<int>, int> slice_index;
  for (int obj = 0; obj < k; ++obj) {
    const auto& src = graph.object_sources[obj];
    if (src.empty()) throw ConfigError("object without a source");
    auto [it, fresh] = slice_index.try_emplace(src, static_cast<int>(r.slices.size()));
    if (fresh) r.slices.push_back(build_slice(graph, src));
    r.slice_of_object[obj] = it->second;
  }

  r.phi_offset.assign(k + 1, 0);
  for (int obj = 0; obj < k; ++obj)
    r.phi_offset[obj + 1] =
        r.phi_offset[obj] + r.slices[r.slice_of_object[obj]].arc_offset.back();
  return r;
}

void NodeArcIndex::build(const RoutingGraph& r, int node_index, int catalog) {
  node = node_index;
  offset.assign(catalog + 1, 0);
  base_arc.assign(catalog, 0);
  for (int k = 0; k < catalog; ++k) {
    const RoutingSlice& s = r.slice(k);
    base_arc[k] = s.arc_offset[node_index];
    offset[k + 1] = offset[k] + s.arc_count(node_index);
  }
}

}  // namespace mindelay
