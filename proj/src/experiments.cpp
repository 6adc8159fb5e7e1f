#include "mindelay/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "mindelay/routing.hpp"

namespace mindelay {

const TopologyOptions& ExperimentPlan::options_for(
    const std::string& topology) const {
  const auto it = overrides.find(topology);
  return it == overrides.end() ? options : it->second;
}

double cache_hit_rate(std::uint64_t hits, int nodes, double horizon) {
  if (nodes <= 0 || horizon <= 0.0) return 0.0;
  return static_cast<double>(hits) / (nodes * horizon);
}

std::vector<RunRecord> run_plan(const ExperimentPlan& plan) {
  std::vector<RunRecord> records;
  for (const std::string& name : plan.topologies) {
    Scenario scenario = load_topology(name, plan.options_for(name));
    const RoutingGraph routing = build_fib(scenario.graph);
    const int base = static_cast<int>(records.size());
    for (const std::string& strategy : plan.strategies)
      for (double rate : plan.rates)
        for (std::uint64_t seed : plan.seeds) {
          RunRecord rec;
          rec.topology = name;
          rec.strategy = strategy;
          rec.rate = rate;
          rec.seed = seed;
          records.push_back(std::move(rec));
        }
    const int count = static_cast<int>(records.size()) - base;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      RunRecord& rec = records[base + i];
      try {
        SimConfig config;
        config.rate = rec.rate;
        config.horizon = plan.horizon;
        config.update_interval = plan.update_interval;
        config.seed = rec.seed;
        config.flow_estimator = plan.flow_estimator;
        auto strategy =
            make_strategy(rec.strategy, scenario.graph, routing, config);
        const SimResult result = run_simulation(scenario.graph, routing,
                                                scenario.demand, *strategy,
                                                config);
        rec.total_delay = result.metrics.total_delay;
        rec.mean_delay = result.metrics.fulfilled
                             ? result.metrics.total_delay /
                                   static_cast<double>(result.metrics.fulfilled)
                             : 0.0;
        rec.cache_hit_rate = cache_hit_rate(result.metrics.cache_hits,
                                            scenario.graph.node_count(),
                                            plan.horizon);
        rec.generated = result.metrics.generated;
        rec.fulfilled = result.metrics.fulfilled;
        rec.cache_hits = result.metrics.cache_hits;
        rec.anomalies = result.metrics.anomalies();
        rec.trace_hash = result.metrics.trace_hash;
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  }
  return records;
}

std::vector<CellStats> aggregate(const std::vector<RunRecord>& runs) {
  std::vector<CellStats> cells;
  auto cell_for = [&](const RunRecord& r) -> CellStats& {
    for (CellStats& c : cells)
      if (c.topology == r.topology && c.strategy == r.strategy &&
          c.rate == r.rate)
        return c;
    CellStats c;
    c.topology = r.topology;
    c.strategy = r.strategy;
    c.rate = r.rate;
    cells.push_back(std::move(c));
    return cells.back();
  };
  // two passes: means, then spread
  for (const RunRecord& r : runs) {
    if (r.failed) {
      cell_for(r);  // keep the cell visible even if every seed failed
      continue;
    }
    CellStats& c = cell_for(r);
    ++c.runs;
    c.delay_mean += r.total_delay;
    c.hits_mean += r.cache_hit_rate;
  }
  for (CellStats& c : cells)
    if (c.runs > 0) {
      c.delay_mean /= c.runs;
      c.hits_mean /= c.runs;
    }
  for (const RunRecord& r : runs) {
    if (r.failed) continue;
    CellStats& c = cell_for(r);
    const double dd = r.total_delay - c.delay_mean;
    const double dh = r.cache_hit_rate - c.hits_mean;
    c.delay_std += dd * dd;
    c.hits_std += dh * dh;
  }
  for (CellStats& c : cells)
    if (c.runs > 1) {
      c.delay_std = std::sqrt(c.delay_std / (c.runs - 1));
      c.hits_std = std::sqrt(c.hits_std / (c.runs - 1));
    } else {
      c.delay_std = 0.0;
      c.hits_std = 0.0;
    }
  return cells;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n') c = ' ';
  return s;
}

}  // namespace

void write_outputs(const std::vector<RunRecord>& runs,
                   const std::vector<CellStats>& cells,
                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    std::ofstream out(fs::path(out_dir) / "runs.tsv");
    out << "topology\tstrategy\trate\tseed\tstatus\ttotal_delay\tmean_delay"
           "\tcache_hit_rate\tgenerated\tfulfilled\tcache_hits\tanomalies"
           "\ttrace_hash\n";
    for (const RunRecord& r : runs) {
      out << r.topology << '\t' << r.strategy << '\t' << fmt(r.rate) << '\t'
          << r.seed << '\t' << (r.failed ? sanitize(r.error) : "ok") << '\t'
          << fmt(r.total_delay) << '\t' << fmt(r.mean_delay) << '\t'
          << fmt(r.cache_hit_rate) << '\t' << r.generated << '\t'
          << r.fulfilled << '\t' << r.cache_hits << '\t' << r.anomalies
          << '\t' << r.trace_hash << '\n';
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "summary.tsv");
    out << "topology\tstrategy\trate\tseed_count\tdelay_mean\tdelay_std"
           "\thits_mean\thits_std\n";
    for (const CellStats& c : cells)
      out << c.topology << '\t' << c.strategy << '\t' << fmt(c.rate) << '\t'
          << c.runs << '\t' << fmt(c.delay_mean) << '\t' << fmt(c.delay_std)
          << '\t' << fmt(c.hits_mean) << '\t' << fmt(c.hits_std) << '\n';
  }
  {
    std::ofstream out(fs::path(out_dir) / "delay_vs_rate.tsv");
    out << "topology\tstrategy\trate\tdelay_mean\tdelay_std\n";
    for (const CellStats& c : cells)
      out << c.topology << '\t' << c.strategy << '\t' << fmt(c.rate) << '\t'
          << fmt(c.delay_mean) << '\t' << fmt(c.delay_std) << '\n';
  }
  {
    std::ofstream out(fs::path(out_dir) / "hits_vs_rate.tsv");
    out << "topology\tstrategy\trate\thits_mean\thits_std\n";
    for (const CellStats& c : cells)
      out << c.topology << '\t' << c.strategy << '\t' << fmt(c.rate) << '\t'
          << fmt(c.hits_mean) << '\t' << fmt(c.hits_std) << '\n';
  }
}

ExperimentPlan desk_preset() {
  ExperimentPlan p;
  p.topologies = builtin_topologies();
  p.strategies = strategy_names();
  p.rates = {0.5, 1.0, 2.0};
  p.seeds.resize(10);
  std::iota(p.seeds.begin(), p.seeds.end(), 1);
  p.horizon = 100.0;
  p.update_interval = 3.0;
  p.options.catalog_size = 100;
  p.options.cache_capacity = 10;

  TopologyOptions big = p.options;
  big.cache_capacity = 20;
  p.overrides["geant"] = big;
  p.overrides["dtelekom"] = big;
  TopologyOptions abilene = big;
  abilene.link_capacity_mbps = 50.0;
  p.overrides["abilene"] = abilene;
  return p;
}

ExperimentPlan paper_preset() {
  ExperimentPlan p;
  p.topologies = builtin_topologies();
  p.strategies = strategy_names();
  p.rates = {0.5, 1.0, 2.0, 4.0, 8.0};
  p.seeds.resize(10);
  std::iota(p.seeds.begin(), p.seeds.end(), 1);
  p.horizon = 1000.0;
  p.update_interval = 3.0;
  TopologyOptions abilene;
  abilene.link_capacity_mbps = 50.0;
  p.overrides["abilene"] = abilene;
  return p;
}

}  // namespace mindelay
