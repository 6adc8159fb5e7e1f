#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mindelay/routing.hpp"
#include "mindelay/topology.hpp"

namespace mindelay {

// One joint forwarding/caching configuration of the fluid model.
//   phi: request split ratios, flat per object over the slice's arc slots
//        (index routing.phi_offset[k] + slice.arc_offset[i] + local arc)
//   rho: cache fractions in [0,1], rho[k*N + i]
struct ForwardingCachingPoint {
  std::vector<double> phi;
  std::vector<double> rho;

  double phi_at(const RoutingGraph& r, int object, int flat_arc) const {
    return phi[r.phi_offset[object] + flat_arc];
  }
  double rho_at(int node_count, int object, int node) const {
    return rho[static_cast<std::size_t>(object) * node_count + node];
  }
};

// Even split over every next-hop set, nothing cached.
ForwardingCachingPoint uniform_point(const NetworkGraph& g, const RoutingGraph& r);

// Throws ConfigError when a split row is off the simplex, a rho leaves [0,1],
// or a node's cache fractions exceed its capacity.
void validate_point(const NetworkGraph& g, const RoutingGraph& r,
                    const ForwardingCachingPoint& p, double tol = 1e-9);

// JSON round-trip. Unlisted split rows default to uniform, unlisted rho to 0.
ForwardingCachingPoint load_point(const std::string& path, const NetworkGraph& g,
                                  const RoutingGraph& r);
void save_point(const std::string& path, const NetworkGraph& g,
                const RoutingGraph& r, const ForwardingCachingPoint& p);

}  // namespace mindelay
