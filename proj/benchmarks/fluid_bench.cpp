// Times the OpenMP fluid kernels against their serial reference twins on a
// built-in instance, after checking both produce identical bits. Usage:
//   fluid_bench [topology] [objects] [reps]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "mindelay/fluid.hpp"
#include "mindelay/point.hpp"
#include "mindelay/routing.hpp"
#include "mindelay/topology.hpp"

using namespace mindelay;

namespace {

template <typename Body>
double best_of(int reps, Body body) {
  double best = 1e18;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    best = std::min(best, s);
  }
  return best;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string topology = argc > 1 ? argv[1] : "dtelekom";
  TopologyOptions opt;
  opt.catalog_size = argc > 2 ? std::atoi(argv[2]) : 500;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 5;
  if (topology == "abilene") opt.link_capacity_mbps = 50;

  const Scenario sc = load_topology(topology, opt);
  const NetworkGraph& g = sc.graph;
  const RoutingGraph r = build_fib(g);
  const std::vector<double> rates = sc.demand.rate_matrix(g);

  // splits stay uniform; give the caches something so the rho path runs
  ForwardingCachingPoint p = uniform_point(g, r);
  const int n = g.node_count();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < std::min(g.cache_capacity[i], g.catalog_size); ++k)
      if (!g.is_source(i, k))
        p.rho[static_cast<std::size_t>(k) * n + i] = 0.5;

  std::printf("%s: %d nodes, %zu links, %d objects, %d reps\n", topology.c_str(),
              n, g.links.size(), g.catalog_size, reps);

  // agreement first, then the clocks
  const FluidSolution par = evaluate_fluid(g, r, rates, p);
  const FluidSolution ser = reference::evaluate_fluid(g, r, rates, p);
  if (!same_bits(par.traffic, ser.traffic) ||
      !same_bits(par.link_flow, ser.link_flow) ||
      !same_bits(par.link_marginal, ser.link_marginal) ||
      !same_bits(par.demand_marginal, ser.demand_marginal) ||
      par.total_cost != ser.total_cost) {
    std::printf("MISMATCH: parallel and serial kernels disagree\n");
    return 1;
  }
  std::printf("kernels agree bit for bit, cost %.9g\n\n", par.total_cost);

  double sink = 0.0;  // keeps the loops honest
  std::vector<double> traffic, flows, lm;

  struct Row {
    const char* name;
    double parallel;
    double serial;
  };
  std::vector<Row> rows;

  rows.push_back({"traffic", best_of(reps,
                                     [&] {
                                       traffic = compute_traffic(g, r, rates, p);
                                       sink += traffic.back();
                                     }),
                  best_of(reps, [&] {
                    traffic = reference::compute_traffic(g, r, rates, p);
                    sink += traffic.back();
                  })});
  rows.push_back({"link flows", best_of(reps,
                                        [&] {
                                          flows = compute_link_flows(g, r, p, traffic);
                                          sink += flows.back();
                                        }),
                  best_of(reps, [&] {
                    flows = reference::compute_link_flows(g, r, p, traffic);
                    sink += flows.back();
                  })});
  rows.push_back({"marginals", best_of(reps,
                                       [&] {
                                         sink += compute_marginals(g, r, p, flows, lm).back();
                                       }),
                  best_of(reps, [&] {
                    sink += reference::compute_marginals(g, r, p, flows, lm).back();
                  })});
  rows.push_back({"full evaluation", best_of(reps,
                                             [&] {
                                               sink += evaluate_fluid(g, r, rates, p).total_cost;
                                             }),
                  best_of(reps, [&] {
                    sink += reference::evaluate_fluid(g, r, rates, p).total_cost;
                  })});

  std::printf("%-16s %12s %12s %9s\n", "kernel", "parallel", "serial", "speedup");
  for (const Row& row : rows)
    std::printf("%-16s %10.3f ms %10.3f ms %8.2fx\n", row.name,
                1e3 * row.parallel, 1e3 * row.serial, row.serial / row.parallel);
  if (!std::isfinite(sink)) std::printf("sink overflowed\n");
  return 0;
}
