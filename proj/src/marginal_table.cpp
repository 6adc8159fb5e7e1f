#include "mindelay/mindelay_online.hpp"

namespace mindelay {

MarginalCostTable::MarginalCostTable(const NetworkGraph& g,
                                     const RoutingGraph& r, int node,
                                     double smoothing)
    : g_(&g), r_(&r), node_(node), smoothing_(smoothing) {
  index_.build(r, node, g.catalog_size);
  const int catalog = g.catalog_size;
  delta_.assign(index_.slots(), 0.0);
  ddr_.assign(catalog, 0.0);
  next_hop_.assign(catalog, -1);
  stale_.assign(catalog, 0);
  t_hat_.assign(catalog, 0.0);
  cached_.assign(catalog, 0);
  fwd_count_.assign(index_.slots(), 0.0);
  data_count_.assign(index_.slots(), 0.0);
  recv_count_.assign(catalog, 0.0);
  link_flow_.assign(g.links.size(), 0.0);
  score_in_set_.assign(catalog, 0.0);
}

double MarginalCostTable::min_delta(int object) const {
  const int arc = next_hop_[object];
  return arc < 0 ? kInfiniteCost : delta_[index_.slot(object, arc)];
}

double MarginalCostTable::cache_score(int object) const {
  return scaled_cost(t_hat_[object], min_delta(object));
}

void MarginalCostTable::note_cached(int object) {
  cached_[object] = 1;
  const double score = cache_score(object);
  scores_.emplace(score, object);
  score_in_set_[object] = score;
}

void MarginalCostTable::note_evicted(int object) {
  cached_[object] = 0;
  scores_.erase({score_in_set_[object], object});
}

void MarginalCostTable::begin_refresh(double interval,
                                      FlowEstimator estimator) {
  interval = interval > 0.0 ? interval : 1.0;
  const std::vector<double>& counts =
      estimator == FlowEstimator::kDataRate ? data_count_ : fwd_count_;
  std::vector<double> window(g_->links.size(), 0.0);
  for (int k = 0; k < g_->catalog_size; ++k) {
    const RoutingSlice& s = r_->slice(k);
    const int a0 = s.arc_offset[node_];
    const int a1 = s.arc_offset[node_ + 1];
    for (int a = a0; a < a1; ++a)
      window[s.arc_link[a]] +=
          counts[index_.slot(k, a)] * g_->object_size_bits / interval;
    t_hat_[k] += smoothing_ * (recv_count_[k] / interval - t_hat_[k]);
  }
  for (std::size_t l = 0; l < window.size(); ++l)
    link_flow_[l] += smoothing_ * (window[l] - link_flow_[l]);
}

void MarginalCostTable::refresh_object(
    int object, const std::vector<MarginalCostTable>& tables) {
  stale_[object] = 0;
  const RoutingSlice& s = r_->slice(object);
  if (s.is_source(node_) || s.arc_count(node_) == 0) {
    ddr_[object] = 0.0;
    next_hop_[object] = -1;
    return;
  }
  const int a0 = s.arc_offset[node_];
  const int a1 = s.arc_offset[node_ + 1];
  int best_arc = -1;
  double best = kInfiniteCost;
  double total = 0.0;
  for (int a = a0; a < a1; ++a) {
    const int rev = g_->reverse_link[s.arc_link[a]];
    const double d =
        link_cost_derivative(link_flow_[s.arc_link[a]],
                             g_->links[rev].capacity_bps) +
        tables[s.arc_to[a]].ddr_[object] / g_->object_size_bits;
    delta_[index_.slot(object, a)] = d;
    if (best_arc < 0 || d < best) {
      best = d;
      best_arc = a;
    }
    total += fwd_count_[index_.slot(object, a)];
  }
  next_hop_[object] = best_arc;
  // measured split when anything moved, otherwise all mass on the argmin
  double sum = 0.0;
  if (total > 0.0) {
    for (int a = a0; a < a1; ++a)
      sum += scaled_cost(fwd_count_[index_.slot(object, a)] / total,
                         delta_[index_.slot(object, a)]);
  } else {
    sum = best;
  }
  const double rho = cached_[object] ? 1.0 : 0.0;
  ddr_[object] = scaled_cost((1.0 - rho) * g_->object_size_bits, sum);
}

void MarginalCostTable::finish_refresh() {
  fwd_count_.assign(fwd_count_.size(), 0.0);
  data_count_.assign(data_count_.size(), 0.0);
  recv_count_.assign(recv_count_.size(), 0.0);
  scores_.clear();
  for (int k = 0; k < g_->catalog_size; ++k) {
    if (!cached_[k]) continue;
    const double score = cache_score(k);
    scores_.emplace(score, k);
    score_in_set_[k] = score;
  }
}

void update_marginal_tables(const NetworkGraph& g, const RoutingGraph& r,
                            std::vector<MarginalCostTable>& tables,
                            double interval, FlowEstimator estimator) {
  for (MarginalCostTable& t : tables) t.begin_refresh(interval, estimator);
  for (int k = 0; k < g.catalog_size; ++k) {
    const RoutingSlice& s = r.slice(k);
    for (int i : s.marginal_order) tables[i].refresh_object(k, tables);
  }
  for (MarginalCostTable& t : tables) t.finish_refresh();
}

int online_forwarding_decision(const MarginalCostTable& table, int object) {
  return table.next_hop(object);
}

int online_cache_decision(const MarginalCostTable& table, int k_new) {
  if (table.cached_scores().empty()) return -1;
  const auto& cheapest = *table.cached_scores().begin();
  return table.cache_score(k_new) > cheapest.first ? cheapest.second : -1;
}

}  // namespace mindelay
