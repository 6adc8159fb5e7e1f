#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "mindelay/rng.hpp"
#include "mindelay/routing.hpp"
#include "mindelay/topology.hpp"

namespace mindelay {

// Virtual interest plane for the backpressure strategy. Counters build up
// with exogenous requests and drain along links in slotted rounds; data
// packets never look at this plane, it only steers decisions.
struct VipState {
  int nodes = 0;
  int objects = 0;
  double slot_seconds = 0.0;
  std::vector<double> counters;  // [node * objects + k]
  std::vector<double> arrivals;  // exogenous adds since the last slot
  std::vector<double> inflow;    // total arrivals during the finished slot
  int idx(int node, int k) const { return node * objects + k; }
};

VipState make_vip_state(const NetworkGraph& g, double slot_seconds);

void vip_note_request(VipState& v, int node, int object);

// One slotted round against a snapshot of the counters: every link moves the
// object with the strongest positive differential, bounded by what the link
// could ship in a slot; sources absorb, cached objects drain locally, floors
// at zero. inflow is refilled as the caching metric for the slot that just
// ended.
void vip_slot_update(VipState& v, const NetworkGraph& g, const RoutingGraph& r,
                     const std::vector<std::set<int>>& cached);

// Live-counter forwarding: hop with the largest nonnegative differential,
// ties and the all-zero case fall to the lowest neighbor id. Returns a flat
// arc of the slice.
int bp_forward(const VipState& v, const RoutingSlice& s, int node, int object);

// Objects the node should hold next slot: top capacity by inflow, ties to the
// lower id, own source objects excluded.
std::vector<int> vip_cache_update(const VipState& v, const RoutingGraph& r,
                                  int node, int capacity);

// Pending-interest forwarding: pick among a node's hops with probability
// proportional to 1/(outstanding+1). Returns a local hop index.
int lfum_pi_forward(const std::vector<double>& outstanding, RngStream& rng);

// Smoothed round-trip estimates per (object, hop) slot of one node.
struct RttEstimators {
  double beta = 0.125;
  std::vector<double> avg;
  std::vector<char> sampled;

  explicit RttEstimators(int slots = 0) : avg(slots, 0.0), sampled(slots, 0) {}
  void record(int slot, double sample) {
    avg[slot] = sampled[slot] ? (1.0 - beta) * avg[slot] + beta * sample
                              : sample;
    sampled[slot] = 1;
  }
};

// Weights 1/rtt; hops never sampled borrow the best sampled weight so they
// keep getting probed, and with no samples at all the choice is uniform.
int lfum_rtt_forward(const std::vector<double>& avg_rtt,
                     const std::vector<char>& sampled, RngStream& rng);

// Since-start request counts with displace-the-coldest admission.
struct LfuCacheState {
  std::vector<std::uint64_t> freq;  // per object
  std::set<int> cached;
};

// Victim for k_new when the cache is full: the cached object with the lowest
// (frequency, id), and only if k_new's frequency is strictly higher. -1 keeps
// the cache unchanged.
int lfu_admit(const LfuCacheState& s, int k_new);

}  // namespace mindelay
