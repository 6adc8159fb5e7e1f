#pragma once

#include <utility>
#include <vector>

#include "mindelay/fluid.hpp"

namespace mindelay {

struct ForwardingViolation {
  int node = -1;
  int object = -1;
  int next_hop = -1;     // hop carrying split weight despite a cheaper sibling
  double arc_cost = 0.0;
  double best_cost = 0.0;
};

struct CachingViolation {
  int node = -1;
  int object = -1;
  double score = 0.0;      // traffic-weighted marginal of this object here
  double threshold = 0.0;  // capacity price the score is compared against
  bool should_cache = false;  // true: score clears the bar but rho < 1
};

// Stationarity report for a point. `forwarding`/`caching` are the
// traffic-independent tests (split mass must sit on minimum-marginal hops;
// caches must hold exactly the top scores); `satisfied` reflects those.
// The same caching test driven by raw cost partials instead is kept
// alongside, and pairs flagged by exactly one of the two variants land in
// raw_only/modified_only. Points that block all traffic toward a misrouted
// or miscached object pass the raw test while the primary one flags them.
struct ConditionsReport {
  bool satisfied = true;
  std::vector<ForwardingViolation> forwarding;
  std::vector<CachingViolation> caching;
  std::vector<std::pair<int, int>> raw_only;       // (node, object)
  std::vector<std::pair<int, int>> modified_only;  // (node, object)
  double max_violation = 0.0;  // largest relative gap seen
  int checked_pairs = 0;
};

// Gaps are judged relative to the quantities compared: marginals scale with
// 1/capacity, so a fixed absolute slack would swallow real violations on
// fast links and flag float noise on slow ones.
struct ConditionsOptions {
  double tolerance = 1e-9;
};

ConditionsReport check_modified_conditions(const NetworkGraph& g,
                                           const RoutingGraph& r,
                                           const ForwardingCachingPoint& p,
                                           const FluidSolution& sol,
                                           const ConditionsOptions& opt = {});

}  // namespace mindelay
