#include "mindelay/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mindelay {

namespace {

// threshold an exactly-full cache is priced at: the cheapest score it holds
// must not fall below any score it turned away
double capacity_price(std::vector<double> scores_desc, int slots) {
  if (slots <= 0) return kInfiniteCost;
  if (slots >= static_cast<int>(scores_desc.size())) return 0.0;
  std::nth_element(scores_desc.begin(), scores_desc.begin() + (slots - 1),
                   scores_desc.end(), std::greater<>());
  return scores_desc[slots - 1];
}

}  // namespace

ConditionsReport check_modified_conditions(const NetworkGraph& g,
                                           const RoutingGraph& r,
                                           const ForwardingCachingPoint& p,
                                           const FluidSolution& sol,
                                           const ConditionsOptions& opt) {
  const int n = g.node_count();
  const double tol = opt.tolerance;
  ConditionsReport rep;
  std::set<std::pair<int, int>> flagged_mod, flagged_raw;

  // how far `worse` exceeds `better`, relative to their size
  auto rel_excess = [](double worse, double better) {
    if (std::isinf(worse)) return std::isinf(better) ? 0.0 : kInfiniteCost;
    const double scale =
        std::max({std::abs(worse), std::abs(better), 1e-300});
    return (worse - better) / scale;
  };

  auto note = [&](double excess) {
    rep.max_violation = std::max(rep.max_violation, excess);
  };

  // forwarding: split weight may only sit on hops whose marginal matches the
  // cheapest one
  for (int k = 0; k < g.catalog_size; ++k) {
    const RoutingSlice& s = r.slice(k);
    for (int i = 0; i < n; ++i) {
      const int deg = s.arc_count(i);
      if (deg == 0) continue;
      ++rep.checked_pairs;

      double best = kInfiniteCost, best_raw = kInfiniteCost;
      for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a) {
        best = std::min(best, arc_marginal(g, r, sol, k, a));
        best_raw = std::min(best_raw, partial_wrt_phi(g, r, p, sol, k, i, a));
      }
      for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a) {
        const double w = p.phi[r.phi_offset[k] + a];
        if (w <= 0.0) continue;
        const double delta = arc_marginal(g, r, sol, k, a);
        const double excess = rel_excess(delta, best);
        if (excess > tol) {
          rep.forwarding.push_back({i, k, s.arc_to[a], delta, best});
          flagged_mod.insert({i, k});
          note(excess);
        }
        const double raw = partial_wrt_phi(g, r, p, sol, k, i, a);
        if (rel_excess(raw, best_raw) > tol) flagged_raw.insert({i, k});
      }
    }
  }

  // caching: with scores in hand, a capacity-c cache is stationary exactly
  // when it holds the c largest ones
  for (int i = 0; i < n; ++i) {
    if (g.cache_capacity[i] <= 0) continue;
    std::vector<int> eligible;
    std::vector<double> score, score_raw;
    double occupied = 0.0;
    for (int k = 0; k < g.catalog_size; ++k) {
      const RoutingSlice& s = r.slice(k);
      if (s.is_source(i) || s.arc_count(i) == 0) continue;
      eligible.push_back(k);
      const std::size_t ki = static_cast<std::size_t>(k) * n + i;
      double best = kInfiniteCost;
      for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a)
        best = std::min(best, arc_marginal(g, r, sol, k, a));
      score.push_back(scaled_cost(sol.traffic[ki], best));
      score_raw.push_back(-partial_wrt_rho(g, r, p, sol, k, i));
      occupied += p.rho[ki];
    }
    if (eligible.empty()) continue;
    rep.checked_pairs += static_cast<int>(eligible.size());

    const int slots = std::min<int>(g.cache_capacity[i],
                                    static_cast<int>(eligible.size()));
    const bool full = occupied >= slots - tol;
    const double mu = full ? capacity_price(score, slots) : 0.0;
    const double mu_raw = full ? capacity_price(score_raw, slots) : 0.0;

    for (std::size_t idx = 0; idx < eligible.size(); ++idx) {
      const int k = eligible[idx];
      const double rho = p.rho[static_cast<std::size_t>(k) * n + i];
      if (rel_excess(score[idx], mu) > tol && rho < 1.0 - tol) {
        rep.caching.push_back({i, k, score[idx], mu, true});
        flagged_mod.insert({i, k});
        note(rel_excess(score[idx], mu));
      } else if (rel_excess(mu, score[idx]) > tol && rho > tol) {
        rep.caching.push_back({i, k, score[idx], mu, false});
        flagged_mod.insert({i, k});
        note(rel_excess(mu, score[idx]));
      }
      if ((rel_excess(score_raw[idx], mu_raw) > tol && rho < 1.0 - tol) ||
          (rel_excess(mu_raw, score_raw[idx]) > tol && rho > tol))
        flagged_raw.insert({i, k});
    }
  }

  std::set_difference(flagged_raw.begin(), flagged_raw.end(), flagged_mod.begin(),
                      flagged_mod.end(), std::back_inserter(rep.raw_only));
  std::set_difference(flagged_mod.begin(), flagged_mod.end(), flagged_raw.begin(),
                      flagged_raw.end(), std::back_inserter(rep.modified_only));
  rep.satisfied = rep.forwarding.empty() && rep.caching.empty();
  return rep;
}

}  // namespace mindelay
