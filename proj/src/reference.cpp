#include <cmath>

#include "mindelay/fluid.hpp"

// Serial counterparts of the parallel kernels. The parallel loops are
// independent per object (or per link, with a fixed inner object order), so
// running the same arithmetic serially must give bit-identical output; the
// tests hold both implementations to that.

namespace mindelay::reference {

std::vector<double> compute_traffic(const NetworkGraph& g, const RoutingGraph& r,
                                    const std::vector<double>& rates,
                                    const ForwardingCachingPoint& p) {
  const int n = g.node_count();
  std::vector<double> t(rates);
  for (int k = 0; k < g.catalog_size; ++k) {
    const RoutingSlice& s = r.slice(k);
    double* tk = t.data() + static_cast<std::size_t>(k) * n;
    const double* rhok = p.rho.data() + static_cast<std::size_t>(k) * n;
    const double* phik = p.phi.data() + r.phi_offset[k];
    // gather form: in_arcs lists senders in the order the push form would
    // touch them, keeping the floating-point accumulation order the same
    for (int i : s.traffic_order) {
      double acc = tk[i];
      for (const auto& [from, a] : s.in_arcs[i])
        acc += tk[from] * (1.0 - rhok[from]) * phik[a];
      tk[i] = acc;
    }
  }
  return t;
}

std::vector<double> compute_link_flows(const NetworkGraph& g, const RoutingGraph& r,
                                       const ForwardingCachingPoint& p,
                                       const std::vector<double>& traffic) {
  const int n = g.node_count();
  std::vector<double> flow(g.links.size(), 0.0);
  for (int e = 0; e < static_cast<int>(g.links.size()); ++e) {
    const int i = g.links[e].from;
    double acc = 0.0;
    for (int k = 0; k < g.catalog_size; ++k) {
      const int a = r.slice(k).link_to_arc[e];
      if (a < 0) continue;
      const std::size_t ki = static_cast<std::size_t>(k) * n + i;
      acc += traffic[ki] * (1.0 - p.rho[ki]) * p.phi[r.phi_offset[k] + a];
    }
    flow[e] = acc * g.object_size_bits;
  }
  return flow;
}

std::vector<double> compute_marginals(const NetworkGraph& g, const RoutingGraph& r,
                                      const ForwardingCachingPoint& p,
                                      const std::vector<double>& link_flow,
                                      std::vector<double>& link_marginal) {
  const int n = g.node_count();
  const double size_bits = g.object_size_bits;

  link_marginal.assign(g.links.size(), 0.0);
  for (std::size_t e = 0; e < g.links.size(); ++e) {
    const int rev = g.reverse_link[e];
    if (rev >= 0)
      link_marginal[e] =
          link_cost_derivative(link_flow[e], g.links[rev].capacity_bps);
  }

  std::vector<double> dm(static_cast<std::size_t>(g.catalog_size) * n, 0.0);
  for (int k = 0; k < g.catalog_size; ++k) {
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
  sol.traffic = reference::compute_traffic(g, r, rates, p);
  sol.link_flow = reference::compute_link_flows(g, r, p, sol.traffic);
  sol.total_cost = mindelay::total_cost(g, sol.link_flow);
  sol.saturated = std::isinf(sol.total_cost);
  sol.demand_marginal =
      reference::compute_marginals(g, r, p, sol.link_flow, sol.link_marginal);
  return sol;
}

}  // namespace mindelay::reference
