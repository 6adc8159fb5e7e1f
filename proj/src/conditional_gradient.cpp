#include "mindelay/conditional_gradient.hpp"

#include <algorithm>
#include <cmath>

namespace mindelay {

std::vector<double> solve_forwarding_direction(const NetworkGraph& g,
                                               const RoutingGraph& r,
                                               const FluidSolution& sol) {
  const int n = g.node_count();
  std::vector<double> phi(r.phi_size(), 0.0);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < g.catalog_size; ++k) {
    const RoutingSlice& s = r.slice(k);
    for (int i = 0; i < n; ++i) {
      if (s.arc_count(i) == 0) continue;
      int pick = -1;
      double best = kInfiniteCost;
      for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a) {
        const double delta = arc_marginal(g, r, sol, k, a);
        if (pick < 0 || delta < best) {  // ties keep the lowest-id hop
          pick = a;
          best = delta;
        }
      }
      phi[r.phi_offset[k] + pick] = 1.0;
    }
  }
  return phi;
}

std::vector<double> solve_caching_direction(const NetworkGraph& g,
                                            const RoutingGraph& r,
                                            const ForwardingCachingPoint& p,
                                            const FluidSolution& sol) {
  const int n = g.node_count();
  std::vector<double> rho(static_cast<std::size_t>(g.catalog_size) * n, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    if (g.cache_capacity[i] <= 0) continue;
    // gain of caching k here: the traffic-weighted marginal currently spent
    // forwarding it onward
    std::vector<std::pair<double, int>> gain;
    for (int k = 0; k < g.catalog_size; ++k) {
      const RoutingSlice& s = r.slice(k);
      if (s.is_source(i) || s.arc_count(i) == 0) continue;
      const std::size_t ki = static_cast<std::size_t>(k) * n + i;
      double sum = 0.0;
      for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a)
        sum += scaled_cost(p.phi[r.phi_offset[k] + a],
                           arc_marginal(g, r, sol, k, a));
      gain.emplace_back(scaled_cost(sol.traffic[ki], sum), k);
    }
    const int slots = std::min<int>(g.cache_capacity[i],
                                    static_cast<int>(gain.size()));
    std::sort(gain.begin(), gain.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;  // ties to the lowest object id
    });
    for (int idx = 0; idx < slots; ++idx)
      rho[static_cast<std::size_t>(gain[idx].second) * n + i] = 1.0;
  }
  return rho;
}

DirectionSolution solve_direction(const NetworkGraph& g, const RoutingGraph& r,
                                  const ForwardingCachingPoint& p,
                                  const FluidSolution& sol) {
  DirectionSolution d;
  d.phi = solve_forwarding_direction(g, r, sol);
  d.rho = solve_caching_direction(g, r, p, sol);
  return d;
}

ForwardingCachingPoint frank_wolfe_step(const ForwardingCachingPoint& p,
                                        const DirectionSolution& dir,
                                        double step) {
  ForwardingCachingPoint next = p;
  for (std::size_t i = 0; i < next.phi.size(); ++i)
    next.phi[i] += step * (dir.phi[i] - next.phi[i]);
  for (std::size_t i = 0; i < next.rho.size(); ++i)
    next.rho[i] += step * (dir.rho[i] - next.rho[i]);
  return next;
}

SolveResult run_fluid_mindelay(const NetworkGraph& g, const RoutingGraph& r,
                               const std::vector<double>& rates,
                               const SolveOptions& opt,
                               std::optional<ForwardingCachingPoint> initial) {
  SolveResult res;
  ForwardingCachingPoint x = initial ? std::move(*initial) : uniform_point(g, r);
  ForwardingCachingPoint prev2;  // the point two steps back, for cycle detection
  bool have_prev2 = false;

  res.best_cost = kInfiniteCost;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const FluidSolution sol = evaluate_fluid(g, r, rates, x);
    const ConditionsReport rep =
        check_modified_conditions(g, r, x, sol, {opt.tolerance});
    const int viol =
        static_cast<int>(rep.forwarding.size() + rep.caching.size());
    res.trajectory.push_back({it, sol.total_cost, viol});
    res.iterations = it + 1;

    if (sol.total_cost < res.best_cost ||
        (res.best_cost == kInfiniteCost && res.best_point.phi.empty())) {
      res.best_cost = sol.total_cost;
      res.best_point = x;
    }
    if (rep.satisfied) {
      res.converged = true;
      break;
    }

    const DirectionSolution dir = solve_direction(g, r, x, sol);
    ForwardingCachingPoint next = frank_wolfe_step(x, dir, opt.step_size);
    if (next.phi == x.phi && next.rho == x.rho) {
      // the linearized problem reproduces the current point exactly; nothing
      // further can move, even if the tolerance never reads as satisfied
      res.converged = true;
      break;
    }
    if (have_prev2 && next.phi == prev2.phi && next.rho == prev2.rho) {
      res.oscillated = true;
      x = std::move(next);
      const FluidSolution s2 = evaluate_fluid(g, r, rates, x);
      if (s2.total_cost < res.best_cost) {
        res.best_cost = s2.total_cost;
        res.best_point = x;
      }
      break;
    }
    prev2 = std::move(x);
    have_prev2 = true;
    x = std::move(next);
  }

  res.point = std::move(x);
  const FluidSolution fin = evaluate_fluid(g, r, rates, res.point);
  res.cost = fin.total_cost;
  if (res.best_point.phi.empty()) {
    res.best_point = res.point;
    res.best_cost = res.cost;
  }
  return res;
}

}  // namespace mindelay
