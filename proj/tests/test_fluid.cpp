#include <cmath>

#include "doctest.h"
#include "mindelay/fluid.hpp"
#include "mindelay/point.hpp"
#include "support/oracles.hpp"

using namespace mindelay;

namespace {
const std::string kConfigDir = MINDELAY_CONFIG_DIR;

oracles::Instance fig1() {
  oracles::Instance in;
  Scenario s = load_topology(kConfigDir + "/fig1_instance.json");
  in.graph = std::move(s.graph);
  in.routing = build_fib(in.graph);
  in.rates = s.demand.rate_matrix(in.graph);
  return in;
}
}  // namespace

TEST_CASE("traffic and cost on a hand-checked line") {
  ScenarioSpec spec;
  spec.nodes = {1, 2, 3};
  spec.edges = {{1, 2, 50}, {2, 3, 50}};
  spec.sources = {{3}};
  spec.rates = {{1, 0, 1.0}};
  oracles::Instance in = oracles::finish_instance(spec);
  const ForwardingCachingPoint p = uniform_point(in.graph, in.routing);

  const auto sol = evaluate_fluid(in.graph, in.routing, in.rates, p);
  const int n = 3;
  const int i1 = in.graph.index_of(1), i2 = in.graph.index_of(2),
            i3 = in.graph.index_of(3);
  CHECK(sol.traffic[0 * n + i1] == 1.0);
  CHECK(sol.traffic[0 * n + i2] == 1.0);
  CHECK(sol.traffic[0 * n + i3] == 1.0);  // demand arriving at the source

  const double L = 4e6, C = 5e7;
  const int e12 = in.graph.find_link(i1, i2), e23 = in.graph.find_link(i2, i3);
  CHECK(sol.link_flow[e12] == doctest::Approx(L).epsilon(1e-12));
  CHECK(sol.link_flow[e23] == doctest::Approx(L).epsilon(1e-12));
  CHECK(sol.total_cost == doctest::Approx(2 * L / (C - L)).epsilon(1e-12));

  // marginals compose hop by hop, in per-request units at each node
  const double dprime = C / ((C - L) * (C - L));
  CHECK(sol.demand_marginal[0 * n + i2] == doctest::Approx(L * dprime).epsilon(1e-12));
  CHECK(sol.demand_marginal[0 * n + i1] ==
        doctest::Approx(2 * L * dprime).epsilon(1e-12));
  CHECK(sol.demand_marginal[0 * n + i3] == 0.0);

  const RoutingSlice& sl = in.routing.slice(0);
  CHECK(partial_wrt_phi(in.graph, in.routing, p, sol, 0, i1, sl.arc_offset[i1]) ==
        doctest::Approx(2 * L * dprime).epsilon(1e-12));
  CHECK(partial_wrt_rho(in.graph, in.routing, p, sol, 0, i1) ==
        doctest::Approx(-2 * L * dprime).epsilon(1e-12));
}

TEST_CASE("fig1 point costs are pinned") {
  oracles::Instance in = fig1();
  const auto cache_obj1 =
      load_point(kConfigDir + "/fig1_point_object1.json", in.graph, in.routing);
  const auto cache_obj2 =
      load_point(kConfigDir + "/fig1_point_object2.json", in.graph, in.routing);
  const auto s1 = evaluate_fluid(in.graph, in.routing, in.rates, cache_obj1);
  const auto s2 = evaluate_fluid(in.graph, in.routing, in.rates, cache_obj2);
  CHECK(s1.total_cost == doctest::Approx(6e6 / 4.4e7).epsilon(1e-12));
  CHECK(s2.total_cost == doctest::Approx(4e6 / 4.6e7).epsilon(1e-12));
}

TEST_CASE("derivatives match finite differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const oracles::Instance in = oracles::random_instance(seed);
    const ForwardingCachingPoint p = oracles::random_point(in, seed);
    const auto sol = evaluate_fluid(in.graph, in.routing, in.rates, p);
    REQUIRE(!sol.saturated);

    const int n = in.graph.node_count();
    for (int k = 0; k < in.graph.catalog_size; ++k) {
      const RoutingSlice& s = in.routing.slice(k);
      for (int i = 0; i < n; ++i) {
        for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a) {
          const double got = partial_wrt_phi(in.graph, in.routing, p, sol, k, i, a);
          const double want = oracles::fd_phi(in, p, k, a);
          CHECK(std::abs(got - want) <= 1e-6);
        }
        if (!s.is_source(i) && s.arc_count(i) > 0) {
          const double got = partial_wrt_rho(in.graph, in.routing, p, sol, k, i);
          const double want = oracles::fd_rho(in, p, k, i);
          CHECK(std::abs(got - want) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  TopologyOptions opt;
  opt.catalog_size = 60;
  opt.cache_capacity = 8;
  for (const char* name : {"geant", "fattree"}) {
    const Scenario s = load_topology(name, opt);
    const RoutingGraph r = build_fib(s.graph);
    DemandConfig d = s.demand;
    d.rate_per_node = 0.8;
    const auto rates = d.rate_matrix(s.graph);
    ForwardingCachingPoint p = uniform_point(s.graph, r);
    // fractional caching to exercise the rho terms
    for (std::size_t i = 0; i < p.rho.size(); i += 7) p.rho[i] = 0.5;

    const auto t_par = compute_traffic(s.graph, r, rates, p);
    const auto t_ref = reference::compute_traffic(s.graph, r, rates, p);
    REQUIRE(t_par == t_ref);

    const auto f_par = compute_link_flows(s.graph, r, p, t_par);
    const auto f_ref = reference::compute_link_flows(s.graph, r, p, t_ref);
    REQUIRE(f_par == f_ref);

    std::vector<double> lm_par, lm_ref;
    const auto dm_par = compute_marginals(s.graph, r, p, f_par, lm_par);
    const auto dm_ref = reference::compute_marginals(s.graph, r, p, f_ref, lm_ref);
    REQUIRE(lm_par == lm_ref);
    REQUIRE(dm_par == dm_ref);
  }
}

TEST_CASE("saturation is exactly flow meeting reverse capacity") {
  ScenarioSpec spec;
  spec.nodes = {1, 2};
  spec.edges = {{1, 2, 50}};
  spec.sources = {{2}};
  spec.rates = {{1, 0, 12.0}};  // 12 * 4e6 = 4.8e7 < 5e7
  oracles::Instance in = oracles::finish_instance(spec);
  const ForwardingCachingPoint p = uniform_point(in.graph, in.routing);

  auto sol = evaluate_fluid(in.graph, in.routing, in.rates, p);
  CHECK(!sol.saturated);
  CHECK(std::isfinite(sol.total_cost));

  in.rates[0 * 2 + in.graph.index_of(1)] = 12.5;  // exactly 5e7
  sol = evaluate_fluid(in.graph, in.routing, in.rates, p);
  CHECK(sol.saturated);
  CHECK(std::isinf(sol.total_cost));
  bool any_at_capacity = false;
  for (std::size_t e = 0; e < in.graph.links.size(); ++e) {
    const int rev = in.graph.reverse_link[e];
    if (rev >= 0 && sol.link_flow[e] >= in.graph.links[rev].capacity_bps)
      any_at_capacity = true;
  }
  CHECK(any_at_capacity);

  // marginals stay usable: infinities where traffic flows, zeros where not
  for (double v : sol.demand_marginal) CHECK(!std::isnan(v));
}

TEST_CASE("cost is strictly monotone in any single demand rate") {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    const oracles::Instance in = oracles::random_instance(seed);
    const ForwardingCachingPoint p = oracles::random_point(in, seed, 0.6);
    const double base = oracles::cost_at(in, p);
    REQUIRE(std::isfinite(base));

    const int n = in.graph.node_count();
    for (int k = 0; k < in.graph.catalog_size; ++k) {
      const RoutingSlice& s = in.routing.slice(k);
      for (int i = 0; i < n; ++i) {
        if (s.is_source(i) || s.arc_count(i) == 0) continue;
        auto bumped = in;
        bumped.rates[static_cast<std::size_t>(k) * n + i] += 0.05;
        CHECK(oracles::cost_at(bumped, p) > base);
      }
    }
  }
}

TEST_CASE("zero demand costs nothing") {
  const oracles::Instance base = oracles::random_instance(3);
  oracles::Instance in = base;
  std::fill(in.rates.begin(), in.rates.end(), 0.0);
  const ForwardingCachingPoint p = uniform_point(in.graph, in.routing);
  const auto sol = evaluate_fluid(in.graph, in.routing, in.rates, p);
  CHECK(sol.total_cost == 0.0);
  for (double t : sol.traffic) CHECK(t == 0.0);
  for (double v : sol.demand_marginal) CHECK(v >= 0.0);
}
