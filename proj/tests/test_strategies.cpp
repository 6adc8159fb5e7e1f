#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "mindelay/baselines.hpp"
#include "mindelay/fluid.hpp"
#include "mindelay/mindelay_online.hpp"
#include "mindelay/point.hpp"

using namespace mindelay;

namespace {

// two disjoint routes 1-2-4 and 1-3-4, the upper one twice as fat
Scenario diamond() {
  ScenarioSpec spec;
  spec.nodes = {1, 2, 3, 4};
  spec.edges = {{1, 2, 100}, {1, 3, 50}, {2, 4, 100}, {3, 4, 50}};
  spec.sources = {{4}};
  return make_scenario(spec);
}

Scenario chain(int objects) {
  ScenarioSpec spec;
  spec.nodes = {1, 2, 3};
  spec.edges = {{1, 2, 50}, {2, 3, 50}};
  spec.sources.assign(objects, {3});
  return make_scenario(spec);
}

std::vector<MarginalCostTable> tables_for(const NetworkGraph& g,
                                          const RoutingGraph& r) {
  std::vector<MarginalCostTable> t;
  t.reserve(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) t.emplace_back(g, r, i);
  return t;
}

}  // namespace

TEST_CASE("bp forwarding picks the strongest positive differential") {
  const Scenario sc = diamond();
  const NetworkGraph& g = sc.graph;
  const RoutingGraph r = build_fib(g);
  const RoutingSlice& s = r.slice(0);
  const int i1 = g.index_of(1), i2 = g.index_of(2), i3 = g.index_of(3);
  REQUIRE(s.arc_count(i1) == 2);
  const int a_to_2 = s.arc_offset[i1];      // arcs sorted by neighbor id
  const int a_to_3 = s.arc_offset[i1] + 1;
  CHECK(s.arc_to[a_to_2] == i2);
  CHECK(s.arc_to[a_to_3] == i3);

  VipState v = make_vip_state(g, 1.0);
  v.counters[v.idx(i1, 0)] = 10.0;
  v.counters[v.idx(i2, 0)] = 8.0;   // differential 2
  v.counters[v.idx(i3, 0)] = 3.0;   // differential 7, wins
  CHECK(bp_forward(v, s, i1, 0) == a_to_3);

  // nothing positive: lowest neighbor id
  v.counters[v.idx(i1, 0)] = 0.0;
  CHECK(bp_forward(v, s, i1, 0) == a_to_2);

  // exact tie stays on the first arc
  v.counters[v.idx(i1, 0)] = 10.0;
  v.counters[v.idx(i2, 0)] = 4.0;
  v.counters[v.idx(i3, 0)] = 4.0;
  CHECK(bp_forward(v, s, i1, 0) == a_to_2);

  // a single interface needs no counters at all
  CHECK(bp_forward(v, s, i2, 0) == s.arc_offset[i2]);
}

TEST_CASE("vip slots move on the snapshot, absorb at sources, and log inflow") {
  const Scenario sc = chain(2);
  const NetworkGraph& g = sc.graph;
  const RoutingGraph r = build_fib(g);
  const int i1 = g.index_of(1), i2 = g.index_of(2), i3 = g.index_of(3);

  // slot of 0.4s at 50 Mbps ships 5 objects per link
  VipState v = make_vip_state(g, 0.4);
  std::vector<std::set<int>> cached(g.node_count());

  v.counters[v.idx(i1, 0)] = 8.0;
  v.counters[v.idx(i1, 1)] = 3.0;
  vip_note_request(v, i1, 1);
  vip_note_request(v, i1, 1);
  vip_slot_update(v, g, r, cached);

  // link 1->2 moved 5 of object 0 (differential 8 beats 3); 2->3 saw only
  // the zero snapshot even though the live plane already received
  CHECK(v.counters[v.idx(i1, 0)] == 3.0);
  CHECK(v.counters[v.idx(i2, 0)] == 5.0);
  CHECK(v.counters[v.idx(i1, 1)] == 5.0);  // 3 + 2 arrivals
  CHECK(v.counters[v.idx(i2, 1)] == 0.0);
  CHECK(v.counters[v.idx(i3, 0)] == 0.0);
  CHECK(v.inflow[v.idx(i2, 0)] == 5.0);
  CHECK(v.inflow[v.idx(i1, 1)] == 2.0);  // exogenous arrivals count as inflow
  for (double a : v.arrivals) CHECK(a == 0.0);

  // next slot: the source absorbs object 0, link 1->2 switches to object 1
  vip_slot_update(v, g, r, cached);
  CHECK(v.counters[v.idx(i2, 0)] == 0.0);
  CHECK(v.counters[v.idx(i3, 0)] == 0.0);  // absorbed, not accumulated
  CHECK(v.counters[v.idx(i1, 1)] == 0.0);
  CHECK(v.counters[v.idx(i2, 1)] == 5.0);
  CHECK(v.inflow[v.idx(i2, 1)] == 5.0);
  CHECK(v.inflow[v.idx(i2, 0)] == 0.0);
}

TEST_CASE("vip cache drain floors at zero") {
  const Scenario sc = chain(2);
  const NetworkGraph& g = sc.graph;
  const RoutingGraph r = build_fib(g);
  const int i1 = g.index_of(1), i2 = g.index_of(2);

  VipState v = make_vip_state(g, 0.4);
  std::vector<std::set<int>> cached(g.node_count());
  cached[i1] = {0, 1};
  v.counters[v.idx(i1, 0)] = 20.0;
  v.counters[v.idx(i1, 1)] = 2.0;
  vip_slot_update(v, g, r, cached);

  // 20 -> ships 5 -> drains 5; 2 never ships and drains to the floor
  CHECK(v.counters[v.idx(i1, 0)] == 10.0);
  CHECK(v.counters[v.idx(i1, 1)] == 0.0);
  CHECK(v.counters[v.idx(i2, 0)] == 5.0);
}

TEST_CASE("vip cache ranking follows slot inflow") {
  const Scenario sc = chain(4);
  const NetworkGraph& g = sc.graph;
  const RoutingGraph r = build_fib(g);
  const int i1 = g.index_of(1), i3 = g.index_of(3);

  VipState v = make_vip_state(g, 0.4);
  v.inflow[v.idx(i1, 0)] = 4.0;
  v.inflow[v.idx(i1, 1)] = 9.0;
  v.inflow[v.idx(i1, 2)] = 2.0;
  v.inflow[v.idx(i1, 3)] = 4.0;

  CHECK(vip_cache_update(v, r, i1, 1) == std::vector<int>{1});
  CHECK(vip_cache_update(v, r, i1, 2) == std::vector<int>{1, 0});  // tie: low id
  CHECK(vip_cache_update(v, r, i1, 10) == std::vector<int>{1, 0, 3, 2});

  // a source never caches its own objects
  v.inflow[v.idx(i3, 0)] = 7.0;
  CHECK(vip_cache_update(v, r, i3, 2).empty());
}

TEST_CASE("lfum-pi splits inversely to pending interests") {
  RngStream rng("test-pi", 1);
  const int n = 100000;

  std::vector<double> even = {0.0, 0.0};
  int first = 0;
  for (int i = 0; i < n; ++i)
    if (lfum_pi_forward(even, rng) == 0) ++first;
  double p = 0.5;
  CHECK(std::abs(first - n * p) <= 3 * std::sqrt(n * p * (1 - p)));

  std::vector<double> loaded = {1.0, 3.0};  // weights 1/2 and 1/4
  first = 0;
  for (int i = 0; i < n; ++i)
    if (lfum_pi_forward(loaded, rng) == 0) ++first;
  p = 2.0 / 3.0;
  CHECK(std::abs(first - n * p) <= 3 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("lfum-rtt weights, cold starts, and the estimator") {
  RttEstimators est(3);
  CHECK(est.sampled[1] == 0);
  est.record(1, 0.3);
  CHECK(est.avg[1] == 0.3);  // first sample lands whole
  est.record(1, 0.5);
  CHECK(est.avg[1] == doctest::Approx(0.875 * 0.3 + 0.125 * 0.5).epsilon(1e-15));
  CHECK(est.sampled[1] == 1);
  CHECK(est.sampled[0] == 0);

  RngStream rng("test-rtt", 1);
  const int n = 100000;

  // 1/rtt weighting: 0.1 vs 0.3 gives a 3:1 split
  std::vector<double> avg = {0.1, 0.3};
  std::vector<char> sampled = {1, 1};
  int first = 0;
  for (int i = 0; i < n; ++i)
    if (lfum_rtt_forward(avg, sampled, rng) == 0) ++first;
  double p = 0.75;
  CHECK(std::abs(first - n * p) <= 3 * std::sqrt(n * p * (1 - p)));

  // an unsampled hop borrows the best weight and keeps getting probed
  sampled = {1, 0};
  first = 0;
  for (int i = 0; i < n; ++i)
    if (lfum_rtt_forward(avg, sampled, rng) == 0) ++first;
  p = 0.5;
  CHECK(std::abs(first - n * p) <= 3 * std::sqrt(n * p * (1 - p)));

  // no samples at all: uniform
  sampled = {0, 0};
  first = 0;
  for (int i = 0; i < n; ++i)
    if (lfum_rtt_forward(avg, sampled, rng) == 0) ++first;
  CHECK(std::abs(first - n * p) <= 3 * std::sqrt(n * p * (1 - p)));

  // a zero round trip must not poison the weights
  avg = {0.0, 0.2};
  sampled = {1, 1};
  first = 0;
  for (int i = 0; i < 1000; ++i)
    if (lfum_rtt_forward(avg, sampled, rng) == 0) ++first;
  CHECK(first == 1000);  // weight 1e12 dwarfs 5
}

TEST_CASE("lfu admission displaces only strictly colder objects") {
  LfuCacheState s;
  s.freq = {5, 2, 7, 1};
  s.cached = {0, 1};
  CHECK(lfu_admit(s, 2) == 1);   // 7 > 2, displace the coldest
  CHECK(lfu_admit(s, 3) == -1);  // 1 < 2, keep

  LfuCacheState tie;
  tie.freq = {3, 3, 3, 4};
  tie.cached = {0, 1};
  CHECK(lfu_admit(tie, 2) == -1);  // equal is not enough
  CHECK(lfu_admit(tie, 3) == 0);   // coldest tie resolves to the lowest id

  LfuCacheState empty;
  empty.freq = {1};
  CHECK(lfu_admit(empty, 0) == -1);
}

TEST_CASE("the online table reproduces the fluid recursion from measurements") {
  const Scenario sc = diamond();
  const NetworkGraph& g = sc.graph;
  const RoutingGraph r = build_fib(g);
  const RoutingSlice& s = r.slice(0);
  const int i1 = g.index_of(1), i2 = g.index_of(2), i3 = g.index_of(3),
            i4 = g.index_of(4);
  const double interval = 2.0;

  auto tables = tables_for(g, r);
  const int a12 = s.arc_offset[i1], a13 = s.arc_offset[i1] + 1;
  for (int n = 0; n < 16; ++n) tables[i1].note_interest(0);
  for (int n = 0; n < 12; ++n) tables[i1].note_forwarded(0, a12);
  for (int n = 0; n < 4; ++n) tables[i1].note_forwarded(0, a13);
  for (int n = 0; n < 12; ++n) tables[i2].note_interest(0);
  for (int n = 0; n < 12; ++n) tables[i2].note_forwarded(0, s.arc_offset[i2]);
  for (int n = 0; n < 4; ++n) tables[i3].note_interest(0);
  for (int n = 0; n < 4; ++n) tables[i3].note_forwarded(0, s.arc_offset[i3]);
  update_marginal_tables(g, r, tables, interval, FlowEstimator::kInterestRate);

  // smoothed estimates: an eighth of this window's rate on a zero prior
  const double l12 = 0.125 * (12 * g.object_size_bits / interval);
  const double l13 = 0.125 * (4 * g.object_size_bits / interval);
  CHECK(tables[i1].request_rate(0) == 0.125 * (16 / interval));
  CHECK(tables[i1].link_flow_estimate(g.find_link(i1, i2)) == l12);
  CHECK(tables[i1].link_flow_estimate(g.find_link(i1, i3)) == l13);

  // feed the fluid recursion the very same snapshot: measured split as phi,
  // the tables' smoothed flows as link flows
  ForwardingCachingPoint p = uniform_point(g, r);
  p.phi[r.phi_offset[0] + a12] = 12.0 / 16.0;
  p.phi[r.phi_offset[0] + a13] = 4.0 / 16.0;
  std::vector<double> flow(g.links.size(), 0.0);
  for (int i = 0; i < g.node_count(); ++i)
    for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a)
      flow[s.arc_link[a]] = tables[i].link_flow_estimate(s.arc_link[a]);
  std::vector<double> lm;
  const std::vector<double> dm = compute_marginals(g, r, p, flow, lm);

  const int n = g.node_count();
  for (int i : {i1, i2, i3, i4})
    CHECK(tables[i].demand_marginal(0) == dm[0 * n + i]);
  for (int i : {i1, i2, i3})
    for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a)
      CHECK(tables[i].delta(0, a) ==
            lm[s.arc_link[a]] + dm[0 * n + s.arc_to[a]] / g.object_size_bits);

  // the fat route carries the smaller marginal
  CHECK(tables[i1].next_hop(0) == a12);
  CHECK(online_forwarding_decision(tables[i1], 0) == a12);
  CHECK(tables[i1].min_delta(0) == tables[i1].delta(0, a12));
}

TEST_CASE("a cached copy zeroes the demand marginal, in table and fluid alike") {
  const Scenario sc = chain(1);
  const NetworkGraph& g = sc.graph;
  const RoutingGraph r = build_fib(g);
  const RoutingSlice& s = r.slice(0);
  const int i1 = g.index_of(1), i2 = g.index_of(2);
  const double interval = 2.0;

  auto tables = tables_for(g, r);
  tables[i2].note_cached(0);
  for (int n = 0; n < 8; ++n) tables[i1].note_interest(0);
  for (int n = 0; n < 8; ++n) tables[i1].note_forwarded(0, s.arc_offset[i1]);
  for (int n = 0; n < 8; ++n) tables[i2].note_interest(0);  // all served there
  update_marginal_tables(g, r, tables, interval, FlowEstimator::kInterestRate);

  ForwardingCachingPoint p = uniform_point(g, r);
  p.rho[0 * g.node_count() + i2] = 1.0;
  std::vector<double> flow(g.links.size(), 0.0);
  flow[g.find_link(i1, i2)] =
      tables[i1].link_flow_estimate(g.find_link(i1, i2));
  std::vector<double> lm;
  const std::vector<double> dm = compute_marginals(g, r, p, flow, lm);

  CHECK(tables[i2].demand_marginal(0) == 0.0);
  CHECK(dm[i2] == 0.0);
  CHECK(tables[i1].demand_marginal(0) == dm[i1]);
  CHECK(tables[i1].demand_marginal(0) > 0.0);

  // the copy still has a positive score: request rate times the hop it saves
  const double c = 5e7;
  CHECK(tables[i2].request_rate(0) == 0.125 * (8 / interval));
  CHECK(tables[i2].min_delta(0) == doctest::Approx(1.0 / c).epsilon(1e-12));
  CHECK(tables[i2].cache_score(0) ==
        doctest::Approx(0.5 / c).epsilon(1e-12));
}

TEST_CASE("bootstrap sweep routes by capacity before any traffic") {
  const Scenario sc = diamond();
  const NetworkGraph& g = sc.graph;
  const RoutingGraph r = build_fib(g);
  const RoutingSlice& s = r.slice(0);
  const int i1 = g.index_of(1), i2 = g.index_of(2);

  auto tables = tables_for(g, r);
  CHECK(tables[i1].next_hop(0) == -1);  // nothing decided before the sweep
  CHECK(tables[i1].min_delta(0) == kInfiniteCost);
  CHECK(tables[i1].cache_score(0) == 0.0);  // zero rate kills the infinity

  update_marginal_tables(g, r, tables, 3.0, FlowEstimator::kInterestRate);

  const int a12 = s.arc_offset[i1];
  CHECK(tables[i1].next_hop(0) == a12);
  CHECK(s.arc_to[tables[i1].next_hop(0)] == i2);
  // idle marginals stack 1/C per hop: 1e-8 on the link, 1e-8 from downstream
  CHECK(tables[i1].min_delta(0) == doctest::Approx(2e-8).epsilon(1e-12));
  CHECK(tables[i1].request_rate(0) == 0.0);
}

TEST_CASE("stale objects keep serving the previous decisions") {
  const Scenario sc = diamond();
  const NetworkGraph& g = sc.graph;
  const RoutingGraph r = build_fib(g);
  const int i1 = g.index_of(1);

  auto tables = tables_for(g, r);
  update_marginal_tables(g, r, tables, 3.0, FlowEstimator::kInterestRate);

  const int hop = tables[i1].next_hop(0);
  const double delta = tables[i1].min_delta(0);
  const double ddr = tables[i1].demand_marginal(0);
  CHECK(!tables[i1].stale(0));

  tables[i1].skip_refresh(0);
  CHECK(tables[i1].stale(0));
  CHECK(tables[i1].next_hop(0) == hop);
  CHECK(tables[i1].min_delta(0) == delta);
  CHECK(tables[i1].demand_marginal(0) == ddr);

  tables[i1].refresh_object(0, tables);
  CHECK(!tables[i1].stale(0));
  CHECK(tables[i1].next_hop(0) == hop);
}

TEST_CASE("cache scores order admissions and evictions") {
  const Scenario sc = chain(4);
  const NetworkGraph& g = sc.graph;
  const RoutingGraph r = build_fib(g);
  const RoutingSlice& s = r.slice(0);
  const int i1 = g.index_of(1);
  const int a0 = s.arc_offset[i1];

  auto tables = tables_for(g, r);
  const int pulls[4] = {12, 3, 6, 0};  // object 3 never asked for
  for (int k = 0; k < 4; ++k) {
    for (int n = 0; n < pulls[k]; ++n) {
      tables[i1].note_interest(k);
      tables[i1].note_forwarded(k, a0);
    }
  }
  update_marginal_tables(g, r, tables, 3.0, FlowEstimator::kInterestRate);

  // same single hop for every object, so scores rank purely by request rate
  CHECK(tables[i1].cache_score(0) > tables[i1].cache_score(2));
  CHECK(tables[i1].cache_score(2) > tables[i1].cache_score(1));
  CHECK(tables[i1].cache_score(1) > 0.0);
  CHECK(tables[i1].cache_score(3) == 0.0);

  CHECK(online_cache_decision(tables[i1], 2) == -1);  // empty cache: admit free

  tables[i1].note_cached(0);
  tables[i1].note_cached(1);
  CHECK(tables[i1].cached_scores().size() == 2);
  CHECK(tables[i1].cached_scores().begin()->second == 1);  // cheapest first

  CHECK(online_cache_decision(tables[i1], 2) == 1);   // hotter than the floor
  CHECK(online_cache_decision(tables[i1], 3) == -1);  // colder than everything

  tables[i1].note_evicted(1);
  CHECK(tables[i1].cached_scores().size() == 1);
  CHECK(tables[i1].cached_scores().begin()->second == 0);
}
