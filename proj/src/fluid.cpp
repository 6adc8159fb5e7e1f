#include "mindelay/fluid.hpp"

#include <cmath>

namespace mindelay {

std::vector<double> compute_traffic(const NetworkGraph& g, const RoutingGraph& r,
                                    const std::vector<double>& rates,
                                    const ForwardingCachingPoint& p) {
  const int n = g.node_count();
  const int catalog = g.catalog_size;
  std::vector<double> t(rates);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < catalog; ++k) {
    const RoutingSlice& s = r.slice(k);
    double* tk = t.data() + static_cast<std::size_t>(k) * n;
    const double* rhok = p.rho.data() + static_cast<std::size_t>(k) * n;
    const double* phik = p.phi.data() + r.phi_offset[k];
    for (int i : s.traffic_order) {
      const double w = tk[i] * (1.0 - rhok[i]);
      for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a)
        tk[s.arc_to[a]] += w * phik[a];
    }
  }
  return t;
}

std::vector<double> compute_link_flows(const NetworkGraph& g, const RoutingGraph& r,
                                       const ForwardingCachingPoint& p,
                                       const std::vector<double>& traffic) {
  const int n = g.node_count();
  const int catalog = g.catalog_size;
  const int link_count = static_cast<int>(g.links.size());
  std::vector<double> flow(link_count, 0.0);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < link_count; ++e) {
    const int i = g.links[e].from;
    double acc = 0.0;
    for (int k = 0; k < catalog; ++k) {
      const int a = r.slice(k).link_to_arc[e];
      if (a < 0) continue;
      const std::size_t ki = static_cast<std::size_t>(k) * n + i;
      acc += traffic[ki] * (1.0 - p.rho[ki]) * p.phi[r.phi_offset[k] + a];
    }
    flow[e] = acc * g.object_size_bits;
  }
  return flow;
}

double total_cost(const NetworkGraph& g, const std::vector<double>& link_flow) {
  double sum = 0.0;
  for (std::size_t e = 0; e < g.links.size(); ++e) {
    if (link_flow[e] <= 0.0) continue;
    const int rev = g.reverse_link[e];
    if (rev < 0) return kInfiniteCost;  // response has no way back
    sum += link_cost(link_flow[e], g.links[rev].capacity_bps);
  }
  return sum;
}

std::vector<double> compute_marginals(const NetworkGraph& g, const RoutingGraph& r,
                                      const ForwardingCachingPoint& p,
                                      const std::vector<double>& link_flow,
                                      std::vector<double>& link_marginal) {
  const int n = g.node_count();
  const int catalog = g.catalog_size;
  const int link_count = static_cast<int>(g.links.size());
  const double size_bits = g.object_size_bits;

  link_marginal.assign(link_count, 0.0);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < link_count; ++e) {
    const int rev = g.reverse_link[e];
    if (rev >= 0)
      link_marginal[e] =
          link_cost_derivative(link_flow[e], g.links[rev].capacity_bps);
  }

  std::vector<double> dm(static_cast<std::size_t>(catalog) * n, 0.0);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < catalog; ++k) {
    const RoutingSlice& s = r.slice(k);
    double* dmk = dm.data() + static_cast<std::size_t>(k) * n;
    const double* rhok = p.rho.data() + static_cast<std::size_t>(k) * n;
    const double* phik = p.phi.data() + r.phi_offset[k];
    for (int i : s.marginal_order) {
      if (s.is_source(i) || s.arc_count(i) == 0) continue;
      double sum = 0.0;
      for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a) {
        const double delta =
            link_marginal[s.arc_link[a]] + dmk[s.arc_to[a]] / size_bits;
        sum += scaled_cost(phik[a], delta);
      }
      dmk[i] = scaled_cost((1.0 - rhok[i]) * size_bits, sum);
    }
  }
  return dm;
}

FluidSolution evaluate_fluid(const NetworkGraph& g, const RoutingGraph& r,
                             const std::vector<double>& rates,
                             const ForwardingCachingPoint& p) {
  FluidSolution sol;
  sol.traffic = compute_traffic(g, r, rates, p);
  sol.link_flow = compute_link_flows(g, r, p, sol.traffic);
  sol.total_cost = total_cost(g, sol.link_flow);
  sol.saturated = std::isinf(sol.total_cost);
  sol.demand_marginal = compute_marginals(g, r, p, sol.link_flow, sol.link_marginal);
  return sol;
}

double partial_wrt_phi(const NetworkGraph& g, const RoutingGraph& r,
                       const ForwardingCachingPoint& p, const FluidSolution& sol,
                       int object, int node, int flat_arc) {
  const std::size_t ki = static_cast<std::size_t>(object) * g.node_count() + node;
  const double weight =
      sol.traffic[ki] * (1.0 - p.rho[ki]) * g.object_size_bits;
  return scaled_cost(weight, arc_marginal(g, r, sol, object, flat_arc));
}

double partial_wrt_rho(const NetworkGraph& g, const RoutingGraph& r,
                       const ForwardingCachingPoint& p, const FluidSolution& sol,
                       int object, int node) {
  const RoutingSlice& s = r.slice(object);
  const std::size_t ki = static_cast<std::size_t>(object) * g.node_count() + node;
  double sum = 0.0;
  for (int a = s.arc_offset[node]; a < s.arc_offset[node + 1]; ++a)
    sum += scaled_cost(p.phi[r.phi_offset[object] + a],
                       arc_marginal(g, r, sol, object, a));
  return -scaled_cost(sol.traffic[ki] * g.object_size_bits, sum);
}

}  // namespace mindelay
