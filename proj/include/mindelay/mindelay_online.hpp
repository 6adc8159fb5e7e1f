#pragma once

#include <set>
#include <utility>
#include <vector>

#include "mindelay/cost.hpp"
#include "mindelay/routing.hpp"
#include "mindelay/topology.hpp"

namespace mindelay {

enum class FlowEstimator { kInterestRate, kDataRate };

// Per-node bookkeeping behind the packet-level rules. Between interval
// boundaries the table only counts traffic and serves precomputed decisions;
// the refresh turns the counts into flow estimates and runs the same marginal
// recursion the fluid model uses, fed with measurements instead of a point.
// Until the first refresh everything reads as the zero-flow sweep: marginals
// follow 1/capacity of the return links and request rates are zero, so caches
// fill by room but never evict.
//
// Rate and flow estimates are exponentially smoothed over the interval
// samples. A single interval sees so few requests per object that raw
// windowed rates quantize to 0 or 1 samples; with them, a popular object's
// cache score collapses to zero in any window it happens to miss and the
// cache churns its best contents out. Smoothing keeps the estimator
// measurement-driven while giving it enough memory to rank objects.
class MarginalCostTable {
 public:
  MarginalCostTable(const NetworkGraph& g, const RoutingGraph& r, int node,
                    double smoothing = 0.125);

  // measurement hooks, per-packet cheap
  void note_interest(int object) { recv_count_[object] += 1.0; }
  void note_forwarded(int object, int flat_arc) {
    fwd_count_[index_.slot(object, flat_arc)] += 1.0;
  }
  void note_data(int object, int flat_arc) {
    data_count_[index_.slot(object, flat_arc)] += 1.0;
  }
  void note_cached(int object);
  void note_evicted(int object);

  // precomputed argmin hop (flat arc id, -1 when the node has none for k)
  int next_hop(int object) const { return next_hop_[object]; }
  double delta(int object, int flat_arc) const {
    return delta_[index_.slot(object, flat_arc)];
  }
  double min_delta(int object) const;
  double request_rate(int object) const { return t_hat_[object]; }
  double demand_marginal(int object) const { return ddr_[object]; }
  double link_flow_estimate(int link) const { return link_flow_[link]; }
  bool stale(int object) const { return stale_[object] != 0; }

  double cache_score(int object) const;
  const std::set<std::pair<double, int>>& cached_scores() const {
    return scores_;
  }

  // refresh phases, driven by update_marginal_tables
  void begin_refresh(double interval, FlowEstimator estimator);
  void refresh_object(int object, const std::vector<MarginalCostTable>& tables);
  // keeps the previous estimates for an object whose upstream values did not
  // arrive this interval; decisions continue, marked stale
  void skip_refresh(int object) { stale_[object] = 1; }
  void finish_refresh();

 private:
  const NetworkGraph* g_;
  const RoutingGraph* r_;
  int node_;
  double smoothing_;
  NodeArcIndex index_;

  std::vector<double> delta_;     // per (object, hop) slot
  std::vector<double> ddr_;       // per object, own demand marginal
  std::vector<int> next_hop_;
  std::vector<char> stale_;
  std::vector<double> t_hat_;     // per object, requests/sec
  std::vector<char> cached_;

  std::vector<double> fwd_count_;   // per slot, interests sent this interval
  std::vector<double> data_count_;  // per slot, data returned this interval
  std::vector<double> recv_count_;  // per object, interests seen this interval
  std::vector<double> link_flow_;   // per graph link, latest estimate in bps

  std::set<std::pair<double, int>> scores_;  // cached objects only
  std::vector<double> score_in_set_;         // exact key stored in scores_
};

// Synchronized refresh at an interval boundary: flow estimates first, then
// the marginal recursion per object swept sources-first, so every node reads
// next-hop values already updated this tick. This realizes the
// wait-for-upstream-then-broadcast protocol without modeling the messages.
void update_marginal_tables(const NetworkGraph& g, const RoutingGraph& r,
                            std::vector<MarginalCostTable>& tables,
                            double interval, FlowEstimator estimator);

// table reads wrapped under their rule names
int online_forwarding_decision(const MarginalCostTable& table, int object);

// cached object to displace for k_new, or -1 to keep the cache as is; strict
// comparison against the cheapest cached score, callers admit freely when
// there is room
int online_cache_decision(const MarginalCostTable& table, int k_new);

}  // namespace mindelay
