#pragma once

#include <vector>

#include "mindelay/cost.hpp"
#include "mindelay/point.hpp"
#include "mindelay/routing.hpp"
#include "mindelay/topology.hpp"

namespace mindelay {

// One full evaluation of the fluid model at a point. link_flow[e] is the
// data rate induced by requests forwarded across arc e = (i,j); the queue it
// loads is the reverse link (j,i), so costs and marginals for e are taken
// against that reverse capacity.
struct FluidSolution {
  std::vector<double> traffic;          // t[k*N + i], requests/sec
  std::vector<double> link_flow;        // per link, bps
  std::vector<double> link_marginal;    // cost slope per link
  std::vector<double> demand_marginal;  // d(cost)/d(rate), [k*N + i]
  double total_cost = 0.0;
  bool saturated = false;
};

// rates come k-major: rates[k*N + i], as produced by DemandConfig::rate_matrix

std::vector<double> compute_traffic(const NetworkGraph& g, const RoutingGraph& r,
                                    const std::vector<double>& rates,
                                    const ForwardingCachingPoint& p);

std::vector<double> compute_link_flows(const NetworkGraph& g, const RoutingGraph& r,
                                       const ForwardingCachingPoint& p,
                                       const std::vector<double>& traffic);

double total_cost(const NetworkGraph& g, const std::vector<double>& link_flow);

// Fills link_marginal and returns demand_marginal.
std::vector<double> compute_marginals(const NetworkGraph& g, const RoutingGraph& r,
                                      const ForwardingCachingPoint& p,
                                      const std::vector<double>& link_flow,
                                      std::vector<double>& link_marginal);

FluidSolution evaluate_fluid(const NetworkGraph& g, const RoutingGraph& r,
                             const std::vector<double>& rates,
                             const ForwardingCachingPoint& p);

// Unit marginal of pushing requests for object k across flat arc slot a of
// node i: the direct queue slope plus whatever the next hop charges per
// forwarded request, converted back to per-request units.
inline double arc_marginal(const NetworkGraph& g, const RoutingGraph& r,
                           const FluidSolution& sol, int object, int flat_arc) {
  const RoutingSlice& s = r.slice(object);
  const int j = s.arc_to[flat_arc];
  return sol.link_marginal[s.arc_link[flat_arc]] +
         sol.demand_marginal[static_cast<std::size_t>(object) * g.node_count() + j] /
             g.object_size_bits;
}

double partial_wrt_phi(const NetworkGraph& g, const RoutingGraph& r,
                       const ForwardingCachingPoint& p, const FluidSolution& sol,
                       int object, int node, int flat_arc);

double partial_wrt_rho(const NetworkGraph& g, const RoutingGraph& r,
                       const ForwardingCachingPoint& p, const FluidSolution& sol,
                       int object, int node);

// Serial twins of the kernels above. Same arithmetic in the same order, no
// OpenMP; tests assert bit-identical results against the parallel versions.
namespace reference {

std::vector<double> compute_traffic(const NetworkGraph& g, const RoutingGraph& r,
                                    const std::vector<double>& rates,
                                    const ForwardingCachingPoint& p);

std::vector<double> compute_link_flows(const NetworkGraph& g, const RoutingGraph& r,
                                       const ForwardingCachingPoint& p,
                                       const std::vector<double>& traffic);

std::vector<double> compute_marginals(const NetworkGraph& g, const RoutingGraph& r,
                                      const ForwardingCachingPoint& p,
                                      const std::vector<double>& link_flow,
                                      std::vector<double>& link_marginal);

FluidSolution evaluate_fluid(const NetworkGraph& g, const RoutingGraph& r,
                             const std::vector<double>& rates,
                             const ForwardingCachingPoint& p);

}  // namespace reference

}  // namespace mindelay
