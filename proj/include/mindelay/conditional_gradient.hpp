#pragma once

#include <optional>
#include <vector>

#include "mindelay/conditions.hpp"
#include "mindelay/fluid.hpp"

namespace mindelay {

// Extreme point of the feasible set that minimizes the linearized cost:
// one-hot splits on cheapest hops, caches filled with top-score objects.
struct DirectionSolution {
  std::vector<double> phi;
  std::vector<double> rho;
};

std::vector<double> solve_forwarding_direction(const NetworkGraph& g,
                                               const RoutingGraph& r,
                                               const FluidSolution& sol);

std::vector<double> solve_caching_direction(const NetworkGraph& g,
                                            const RoutingGraph& r,
                                            const ForwardingCachingPoint& p,
                                            const FluidSolution& sol);

DirectionSolution solve_direction(const NetworkGraph& g, const RoutingGraph& r,
                                  const ForwardingCachingPoint& p,
                                  const FluidSolution& sol);

// x <- x + step * (direction - x), elementwise on both blocks
ForwardingCachingPoint frank_wolfe_step(const ForwardingCachingPoint& p,
                                        const DirectionSolution& dir,
                                        double step);

struct SolveOptions {
  int max_iterations = 300;
  double step_size = 1.0;   // full jumps keep iterates at extreme points
  double tolerance = 1e-9;  // stationarity tolerance
};

struct TrajectoryEntry {
  int iteration = 0;
  double cost = 0.0;
  int violations = 0;
};

struct SolveResult {
  ForwardingCachingPoint point;       // last iterate
  ForwardingCachingPoint best_point;  // cheapest iterate seen
  double cost = 0.0;
  double best_cost = 0.0;
  bool converged = false;  // stationarity reached (or an exact fixed point)
  bool oscillated = false; // revisited the point from two steps back
  int iterations = 0;      // evaluations performed
  std::vector<TrajectoryEntry> trajectory;
};

SolveResult run_fluid_mindelay(const NetworkGraph& g, const RoutingGraph& r,
                               const std::vector<double>& rates,
                               const SolveOptions& opt = {},
                               std::optional<ForwardingCachingPoint> initial =
                                   std::nullopt);

}  // namespace mindelay
