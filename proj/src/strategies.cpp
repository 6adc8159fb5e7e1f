#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "mindelay/baselines.hpp"
#include "mindelay/mindelay_online.hpp"
#include "mindelay/rng.hpp"
#include "mindelay/sim.hpp"

namespace mindelay {
namespace {

// flat arc the interest went out on, recovered from where the data came back
int arc_from_data(const NetworkGraph& g, const RoutingGraph& r, int node,
                  int object, int from_node) {
  const int link = g.find_link(node, from_node);
  return link < 0 ? -1 : r.slice(object).link_to_arc[link];
}

class MindelayStrategy final : public Strategy {
 public:
  MindelayStrategy(const NetworkGraph& g, const RoutingGraph& r,
                   const SimConfig& config)
      : g_(g), r_(r), interval_(config.update_interval) {
    if (config.flow_estimator == "interest") {
      estimator_ = FlowEstimator::kInterestRate;
    } else if (config.flow_estimator == "data") {
      estimator_ = FlowEstimator::kDataRate;
    } else {
      throw ConfigError("unknown flow estimator: " + config.flow_estimator);
    }
    tables_.reserve(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) tables_.emplace_back(g, r, i);
    // zero-flow sweep so decisions exist before the first interval
    update_marginal_tables(g_, r_, tables_, interval_, estimator_);
  }

  int pick_next_hop(int node, int object, double) override {
    return online_forwarding_decision(tables_[node], object);
  }

  int pick_eviction(int node, int object, double) override {
    return online_cache_decision(tables_[node], object);
  }

  void on_interval(double) override {
    update_marginal_tables(g_, r_, tables_, interval_, estimator_);
  }

  void on_interest_received(int node, int object, int) override {
    tables_[node].note_interest(object);
  }

  void on_interest_forwarded(int node, int object, int arc, double) override {
    tables_[node].note_forwarded(object, arc);
  }

  void on_data_received(int node, int object, int from_node, double, double,
                        double) override {
    const int arc = arc_from_data(g_, r_, node, object, from_node);
    if (arc >= 0) tables_[node].note_data(object, arc);
  }

  void on_object_cached(int node, int object) override {
    tables_[node].note_cached(object);
  }

  void on_object_evicted(int node, int object) override {
    tables_[node].note_evicted(object);
  }

 private:
  const NetworkGraph& g_;
  const RoutingGraph& r_;
  double interval_;
  FlowEstimator estimator_ = FlowEstimator::kInterestRate;
  std::vector<MarginalCostTable> tables_;
};

class BpStrategy final : public Strategy {
 public:
  BpStrategy(const NetworkGraph& g, const RoutingGraph& r,
             const SimConfig& config)
      : g_(g),
        r_(r),
        vip_(make_vip_state(g, config.update_interval)),
        cached_(g.node_count()),
        desired_(g.node_count(),
                 std::vector<char>(g.catalog_size, 0)) {}

  int pick_next_hop(int node, int object, double) override {
    return bp_forward(vip_, r_.slice(object), node, object);
  }

  // displace only for an object the last slot marked wanted, and only over a
  // cached object that is not wanted itself; the coldest such goes first
  int pick_eviction(int node, int k_new, double) override {
    if (!desired_[node][k_new]) return -1;
    int victim = -1;
    double best = 0.0;
    for (int k : cached_[node]) {
      if (desired_[node][k]) continue;
      const double m = vip_.inflow[vip_.idx(node, k)];
      if (victim < 0 || m < best) {
        victim = k;
        best = m;
      }
    }
    return victim;
  }

  void on_interval(double) override {
    vip_slot_update(vip_, g_, r_, cached_);
    for (int i = 0; i < g_.node_count(); ++i) {
      std::fill(desired_[i].begin(), desired_[i].end(), 0);
      if (g_.cache_capacity[i] <= 0) continue;
      for (int k : vip_cache_update(vip_, r_, i, g_.cache_capacity[i]))
        desired_[i][k] = 1;
    }
  }

  void on_request_generated(int node, int object) override {
    vip_note_request(vip_, node, object);
  }

  void on_object_cached(int node, int object) override {
    cached_[node].insert(object);
  }

  void on_object_evicted(int node, int object) override {
    cached_[node].erase(object);
  }

 private:
  const NetworkGraph& g_;
  const RoutingGraph& r_;
  VipState vip_;
  std::vector<std::set<int>> cached_;
  std::vector<std::vector<char>> desired_;
};

// caching rule shared by both lfum variants; forwarding is what differs
class LfuCachingStrategy : public Strategy {
 public:
  explicit LfuCachingStrategy(const NetworkGraph& g) : lfu_(g.node_count()) {
    for (LfuCacheState& s : lfu_) s.freq.assign(g.catalog_size, 0);
  }

  int pick_eviction(int node, int k_new, double) override {
    return lfu_admit(lfu_[node], k_new);
  }

  void on_interest_received(int node, int object, int) override {
    ++lfu_[node].freq[object];
  }

  void on_object_cached(int node, int object) override {
    lfu_[node].cached.insert(object);
  }

  void on_object_evicted(int node, int object) override {
    lfu_[node].cached.erase(object);
  }

 protected:
  std::vector<LfuCacheState> lfu_;
};

class LfumPiStrategy final : public LfuCachingStrategy {
 public:
  LfumPiStrategy(const NetworkGraph& g, const RoutingGraph& r,
                 const SimConfig& config)
      : LfuCachingStrategy(g), g_(g), r_(r), rng_("lfum-pi", config.seed) {
    index_.reserve(g.node_count());
    pending_.reserve(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) {
      NodeArcIndex idx;
      idx.build(r, i, g.catalog_size);
      pending_.emplace_back(idx.slots(), 0.0);
      index_.push_back(std::move(idx));
    }
  }

  int pick_next_hop(int node, int object, double) override {
    const RoutingSlice& s = r_.slice(object);
    const int a0 = s.arc_offset[node];
    const int count = s.arc_count(node);
    std::vector<double> outstanding(count);
    for (int i = 0; i < count; ++i)
      outstanding[i] = pending_[node][index_[node].slot(object, a0 + i)];
    return a0 + lfum_pi_forward(outstanding, rng_);
  }

  void on_interest_forwarded(int node, int object, int arc, double) override {
    pending_[node][index_[node].slot(object, arc)] += 1.0;
  }

  void on_data_received(int node, int object, int from_node, double, double,
                        double) override {
    const int arc = arc_from_data(g_, r_, node, object, from_node);
    if (arc >= 0) pending_[node][index_[node].slot(object, arc)] -= 1.0;
  }

 private:
  const NetworkGraph& g_;
  const RoutingGraph& r_;
  RngStream rng_;
  std::vector<NodeArcIndex> index_;
  std::vector<std::vector<double>> pending_;
};

class LfumRttStrategy final : public LfuCachingStrategy {
 public:
  LfumRttStrategy(const NetworkGraph& g, const RoutingGraph& r,
                  const SimConfig& config)
      : LfuCachingStrategy(g), g_(g), r_(r), rng_("lfum-rtt", config.seed) {
    index_.reserve(g.node_count());
    rtt_.reserve(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) {
      NodeArcIndex idx;
      idx.build(r, i, g.catalog_size);
      rtt_.emplace_back(idx.slots());
      index_.push_back(std::move(idx));
    }
  }

  int pick_next_hop(int node, int object, double) override {
    const RoutingSlice& s = r_.slice(object);
    const int a0 = s.arc_offset[node];
    const int count = s.arc_count(node);
    std::vector<double> avg(count);
    std::vector<char> sampled(count);
    for (int i = 0; i < count; ++i) {
      const int slot = index_[node].slot(object, a0 + i);
      avg[i] = rtt_[node].avg[slot];
      sampled[i] = rtt_[node].sampled[slot];
    }
    return a0 + lfum_rtt_forward(avg, sampled, rng_);
  }

  void on_data_received(int node, int object, int from_node, double,
                        double forwarded_at, double now) override {
    const int arc = arc_from_data(g_, r_, node, object, from_node);
    if (arc >= 0)
      rtt_[node].record(index_[node].slot(object, arc), now - forwarded_at);
  }

 private:
  const NetworkGraph& g_;
  const RoutingGraph& r_;
  RngStream rng_;
  std::vector<NodeArcIndex> index_;
  std::vector<RttEstimators> rtt_;
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(const std::string& name,
                                        const NetworkGraph& g,
                                        const RoutingGraph& r,
                                        const SimConfig& config) {
  if (name == "mindelay")
    return std::make_unique<MindelayStrategy>(g, r, config);
  if (name == "bp") return std::make_unique<BpStrategy>(g, r, config);
  if (name == "lfum-pi") return std::make_unique<LfumPiStrategy>(g, r, config);
  if (name == "lfum-rtt")
    return std::make_unique<LfumRttStrategy>(g, r, config);
  throw ConfigError("unknown strategy: " + name);
}

const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names = {"mindelay", "bp", "lfum-pi",
                                                 "lfum-rtt"};
  return names;
}

}  // namespace mindelay
