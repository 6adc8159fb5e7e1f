#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mindelay/sim.hpp"
#include "mindelay/topology.hpp"

namespace mindelay {

// A sweep: topologies x strategies x rates x seeds, every cell simulated
// independently. Topology construction happens once per name; runs fan out
// over the flattened grid.
struct ExperimentPlan {
  std::vector<std::string> topologies;
  std::vector<std::string> strategies;
  std::vector<double> rates;          // requests/node/sec
  std::vector<std::uint64_t> seeds;
  double horizon = 100.0;
  double update_interval = 3.0;
  std::string flow_estimator = "interest";
  TopologyOptions options;
  std::map<std::string, TopologyOptions> overrides;  // per topology name

  const TopologyOptions& options_for(const std::string& topology) const;
};

struct RunRecord {
  std::string topology;
  std::string strategy;
  double rate = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;

  double total_delay = 0.0;     // seconds, summed over fulfilled requests
  double mean_delay = 0.0;      // per fulfilled request
  double cache_hit_rate = 0.0;  // hits per node per second of horizon
  std::uint64_t generated = 0;
  std::uint64_t fulfilled = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t anomalies = 0;
  std::uint64_t trace_hash = 0;
};

// Seed-aggregated view of one (topology, strategy, rate) cell. Failed runs
// drop out of the averages; the count says how many made it.
struct CellStats {
  std::string topology;
  std::string strategy;
  double rate = 0.0;
  int runs = 0;
  double delay_mean = 0.0;
  double delay_std = 0.0;
  double hits_mean = 0.0;
  double hits_std = 0.0;
};

double cache_hit_rate(std::uint64_t hits, int nodes, double horizon);

std::vector<RunRecord> run_plan(const ExperimentPlan& plan);

// Cells come out in plan order: topology-major, then strategy, then rate.
std::vector<CellStats> aggregate(const std::vector<RunRecord>& runs);

// runs.tsv (every run), summary.tsv (per-cell aggregates), and the two plot
// tables delay_vs_rate.tsv / hits_vs_rate.tsv. Rewrites are byte identical
// for identical inputs.
void write_outputs(const std::vector<RunRecord>& runs,
                   const std::vector<CellStats>& cells,
                   const std::string& out_dir);

// Small catalog and short horizon: the full strategy grid on every built-in
// topology in desk time.
ExperimentPlan desk_preset();

// Full-size catalogs and long horizon; hours, not minutes.
ExperimentPlan paper_preset();

}  // namespace mindelay
