#include "mindelay/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace mindelay {

VipState make_vip_state(const NetworkGraph& g, double slot_seconds) {
  VipState v;
  v.nodes = g.node_count();
  v.objects = g.catalog_size;
  v.slot_seconds = slot_seconds;
  const std::size_t cells =
      static_cast<std::size_t>(v.nodes) * static_cast<std::size_t>(v.objects);
  v.counters.assign(cells, 0.0);
  v.arrivals.assign(cells, 0.0);
  v.inflow.assign(cells, 0.0);
  return v;
}

void vip_note_request(VipState& v, int node, int object) {
  v.arrivals[v.idx(node, object)] += 1.0;
}

void vip_slot_update(VipState& v, const NetworkGraph& g, const RoutingGraph& r,
                     const std::vector<std::set<int>>& cached) {
  const std::vector<double> snapshot = v.counters;
  std::vector<double> in(v.counters.size(), 0.0);

  // link transfers, decided against the snapshot, applied to the live plane
  for (std::size_t l = 0; l < g.links.size(); ++l) {
    const Link& link = g.links[l];
    const double allowance =
        link.capacity_bps * v.slot_seconds / g.object_size_bits;
    int best_k = -1;
    double best_w = 0.0;
    for (int k = 0; k < v.objects; ++k) {
      if (r.slice(k).link_to_arc[l] < 0) continue;  // not a hop for k
      const double w =
          snapshot[v.idx(link.from, k)] - snapshot[v.idx(link.to, k)];
      if (w > best_w) {
        best_w = w;
        best_k = k;
      }
    }
    if (best_k < 0) continue;
    const double moved =
        std::min(v.counters[v.idx(link.from, best_k)], allowance);
    if (moved <= 0.0) continue;
    v.counters[v.idx(link.from, best_k)] -= moved;
    if (!r.slice(best_k).is_source(link.to)) {
      v.counters[v.idx(link.to, best_k)] += moved;
      in[v.idx(link.to, best_k)] += moved;
    }
  }

  for (std::size_t c = 0; c < v.counters.size(); ++c) {
    v.counters[c] += v.arrivals[c];
    in[c] += v.arrivals[c];
  }

  // a cache copy satisfies interests as fast as the node could ship them out
  std::vector<double> drain(v.nodes, 0.0);
  for (const Link& link : g.links)
    drain[link.from] = std::max(
        drain[link.from], link.capacity_bps * v.slot_seconds / g.object_size_bits);
  for (int i = 0; i < v.nodes; ++i)
    for (int k : cached[i])
      v.counters[v.idx(i, k)] = std::max(0.0, v.counters[v.idx(i, k)] - drain[i]);

  for (int k = 0; k < v.objects; ++k)
    for (int src : r.slice(k).sources) v.counters[v.idx(src, k)] = 0.0;

  v.inflow = std::move(in);
  v.arrivals.assign(v.arrivals.size(), 0.0);
}

int bp_forward(const VipState& v, const RoutingSlice& s, int node, int object) {
  const int a0 = s.arc_offset[node];
  const int a1 = s.arc_offset[node + 1];
  int best = a0;  // arcs sorted by neighbor id, so this is the all-zero case
  double best_w = 0.0;
  for (int a = a0; a < a1; ++a) {
    const double w = v.counters[v.idx(node, object)] -
                     v.counters[v.idx(s.arc_to[a], object)];
    if (w > best_w) {
      best_w = w;
      best = a;
    }
  }
  return best;
}

std::vector<int> vip_cache_update(const VipState& v, const RoutingGraph& r,
                                  int node, int capacity) {
  std::vector<int> order;
  order.reserve(v.objects);
  for (int k = 0; k < v.objects; ++k)
    if (!r.slice(k).is_source(node)) order.push_back(k);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = v.inflow[v.idx(node, a)];
    const double mb = v.inflow[v.idx(node, b)];
    if (ma != mb) return ma > mb;
    return a < b;
  });
  if (static_cast<int>(order.size()) > capacity) order.resize(capacity);
  return order;
}

int lfum_pi_forward(const std::vector<double>& outstanding, RngStream& rng) {
  double total = 0.0;
  for (double c : outstanding) total += 1.0 / (c + 1.0);
  const double u = rng.next_unit() * total;
  double acc = 0.0;
  for (std::size_t a = 0; a < outstanding.size(); ++a) {
    acc += 1.0 / (outstanding[a] + 1.0);
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(outstanding.size()) - 1;
}

int lfum_rtt_forward(const std::vector<double>& avg_rtt,
                     const std::vector<char>& sampled, RngStream& rng) {
  const std::size_t n = avg_rtt.size();
  std::vector<double> w(n, 1.0);
  double best = 0.0;
  bool any = false;
  for (std::size_t a = 0; a < n; ++a) {
    if (!sampled[a]) continue;
    any = true;
    best = std::max(best, 1.0 / std::max(avg_rtt[a], 1e-12));
  }
  if (any) {
    for (std::size_t a = 0; a < n; ++a)
      w[a] = sampled[a] ? 1.0 / std::max(avg_rtt[a], 1e-12) : best;
  }
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  const double u = rng.next_unit() * total;
  double acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    acc += w[a];
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(n) - 1;
}

int lfu_admit(const LfuCacheState& s, int k_new) {
  int victim = -1;
  for (int k : s.cached)
    if (victim < 0 || s.freq[k] < s.freq[victim]) victim = k;
  if (victim < 0) return -1;
  return s.freq[k_new] > s.freq[victim] ? victim : -1;
}

}  // namespace mindelay
