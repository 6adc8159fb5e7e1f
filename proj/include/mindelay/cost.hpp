#pragma once

#include <limits>

namespace mindelay {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

// M/M/1 queue occupancy as the congestion measure of a link carrying
// `flow_bps` against `capacity_bps`. Saturated or oversubscribed links
// absorb to +inf rather than going negative.
inline double link_cost(double flow_bps, double capacity_bps) {
  if (flow_bps <= 0.0) return 0.0;
  if (flow_bps >= capacity_bps) return kInfiniteCost;
  return flow_bps / (capacity_bps - flow_bps);
}

inline double link_cost_derivative(double flow_bps, double capacity_bps) {
  if (flow_bps >= capacity_bps) return kInfiniteCost;
  const double slack = capacity_bps - flow_bps;
  return capacity_bps / (slack * slack);
}

// weight * cost with the convention 0 * inf == 0. Zero-traffic terms must
// contribute nothing even when the marginal behind them has blown up.
inline double scaled_cost(double weight, double cost) {
  if (weight == 0.0) return 0.0;
  return weight * cost;
}

}  // namespace mindelay
