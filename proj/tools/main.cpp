#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mindelay/conditional_gradient.hpp"
#include "mindelay/conditions.hpp"
#include "mindelay/experiments.hpp"
#include "mindelay/fluid.hpp"
#include "mindelay/point.hpp"
#include "mindelay/sim.hpp"
#include "mindelay/topology.hpp"

// exit codes: 0 ok, 1 usage, 2 bad configuration or input file,
// 3 violations/anomalies found, 4 livelock guard tripped
namespace {

constexpr int kExitViolation = 3;
constexpr int kExitLivelock = 4;

struct TopologyArgs {
  std::string name;
  mindelay::TopologyOptions options;

  void attach(CLI::App* cmd) {
    cmd->add_option("-t,--topology", name,
                    "built-in name or path to a topology json")
        ->required();
    cmd->add_option("--objects", options.catalog_size, "catalog size override");
    cmd->add_option("--cache-size", options.cache_capacity,
                    "cache units at every caching node");
    cmd->add_option("--link-capacity-mbps", options.link_capacity_mbps,
                    "capacity override for all links");
    cmd->add_option("--alpha", options.zipf_alpha, "zipf exponent override");
    cmd->add_option("--assignment-seed", options.assignment_seed,
                    "seed for randomized source placement");
  }
};

void write_trajectory(const std::string& path,
                      const std::vector<mindelay::TrajectoryEntry>& t) {
  std::ofstream out(path);
  out << "iteration\tcost\tviolations\n";
  char buf[64];
  for (const auto& e : t) {
    std::snprintf(buf, sizeof buf, "%.9g", e.cost);
    out << e.iteration << '\t' << buf << '\t' << e.violations << '\n';
  }
}

int cmd_list_topologies() {
  for (const std::string& name : mindelay::builtin_topologies())
    std::printf("%s\n", name.c_str());
  return 0;
}

int cmd_solve_fluid(const TopologyArgs& top, double rate,
                    const mindelay::SolveOptions& opt,
                    const std::string& out_dir) {
  using namespace mindelay;
  Scenario sc = load_topology(top.name, top.options);
  if (rate > 0) sc.demand.rate_per_node = rate;
  const RoutingGraph r = build_fib(sc.graph);
  const std::vector<double> rates = sc.demand.rate_matrix(sc.graph);

  const SolveResult res = run_fluid_mindelay(sc.graph, r, rates, opt);
  std::printf("topology       %s\n", sc.name.c_str());
  std::printf("iterations     %d\n", res.iterations);
  std::printf("converged      %s\n", res.converged ? "yes" : "no");
  std::printf("oscillated     %s\n", res.oscillated ? "yes" : "no");
  std::printf("final cost     %.9g\n", res.cost);
  std::printf("best cost      %.9g\n", res.best_cost);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_trajectory((dir / "trajectory.tsv").string(), res.trajectory);
    save_point((dir / "point.json").string(), sc.graph, r, res.best_point);
    std::printf("wrote          %s\n", out_dir.c_str());
  }
  return 0;
}

int cmd_check_conditions(const TopologyArgs& top, const std::string& point_path,
                         double tolerance) {
  using namespace mindelay;
  Scenario sc = load_topology(top.name, top.options);
  const RoutingGraph r = build_fib(sc.graph);
  const ForwardingCachingPoint p = load_point(point_path, sc.graph, r);
  validate_point(sc.graph, r, p);

  const std::vector<double> rates = sc.demand.rate_matrix(sc.graph);
  const FluidSolution sol = evaluate_fluid(sc.graph, r, rates, p);
  ConditionsOptions opt;
  if (tolerance > 0) opt.tolerance = tolerance;
  const ConditionsReport rep = check_modified_conditions(sc.graph, r, p, sol, opt);

  std::printf("total cost     %.9g\n", sol.total_cost);
  std::printf("pairs checked  %d\n", rep.checked_pairs);
  std::printf("forwarding     %zu violations\n", rep.forwarding.size());
  std::printf("caching        %zu violations\n", rep.caching.size());
  std::printf("max gap        %.3g\n", rep.max_violation);
  for (const auto& v : rep.forwarding)
    std::printf("  split at node %d object %d rides %.6g over %.6g via hop %d\n",
                sc.graph.node_ids[v.node], v.object + 1, v.arc_cost, v.best_cost,
                sc.graph.node_ids[v.next_hop]);
  for (const auto& v : rep.caching)
    std::printf("  node %d object %d score %.6g vs price %.6g, should %s\n",
                sc.graph.node_ids[v.node], v.object + 1, v.score, v.threshold,
                v.should_cache ? "cache" : "evict");
  std::printf("%s\n", rep.satisfied ? "conditions satisfied"
                                    : "conditions violated");
  return rep.satisfied ? 0 : kExitViolation;
}

int cmd_simulate(const TopologyArgs& top, const std::string& strategy,
                 mindelay::SimConfig config, const std::string& out_dir) {
  using namespace mindelay;
  config.collect_requests = !out_dir.empty();
  Scenario sc = load_topology(top.name, top.options);
  const RoutingGraph r = build_fib(sc.graph);
  auto strat = make_strategy(strategy, sc.graph, r, config);
  const SimResult res = run_simulation(sc.graph, r, sc.demand, *strat, config);

  const SimMetrics& m = res.metrics;
  std::printf("strategy       %s\n", strategy.c_str());
  std::printf("generated      %llu\n", (unsigned long long)m.generated);
  std::printf("fulfilled      %llu\n", (unsigned long long)m.fulfilled);
  std::printf("cache hits     %llu\n", (unsigned long long)m.cache_hits);
  std::printf("total delay    %.9g s\n", m.total_delay);
  std::printf("mean delay     %.9g s\n",
              m.fulfilled ? m.total_delay / (double)m.fulfilled : 0.0);
  std::printf("end time       %.9g s\n", m.end_time);
  std::printf("events         %llu\n", (unsigned long long)m.events);
  std::printf("trace hash     %016llx\n", (unsigned long long)m.trace_hash);
  if (m.anomalies())
    std::printf("anomalies      %llu (fib drops %llu, orphan data %llu, "
                "nonce collisions %llu)\n",
                (unsigned long long)m.anomalies(),
                (unsigned long long)m.fib_drops,
                (unsigned long long)m.orphan_data,
                (unsigned long long)m.nonce_collisions);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    {
      std::ofstream out(dir / "requests.tsv");
      out << "created\tfulfilled\tdelay\tobject\trequester\n";
      char buf[128];
      for (const auto& q : res.requests) {
        std::snprintf(buf, sizeof buf, "%.9g\t%.9g\t%.9g\t%d\t%d\n", q.created,
                      q.fulfilled, q.fulfilled - q.created, q.object + 1,
                      sc.graph.node_ids[q.requester]);
        out << buf;
      }
    }
    {
      std::ofstream out(dir / "hits.tsv");
      out << "time\tnode\tobject\n";
      char buf[96];
      for (const auto& h : res.hits) {
        std::snprintf(buf, sizeof buf, "%.9g\t%d\t%d\n", h.time,
                      sc.graph.node_ids[h.node], h.object + 1);
        out << buf;
      }
    }
    std::printf("wrote          %s\n", out_dir.c_str());
  }
  return m.anomalies() ? kExitViolation : 0;
}

int cmd_experiment(mindelay::ExperimentPlan plan, const std::string& out_dir) {
  using namespace mindelay;
  const std::vector<RunRecord> runs = run_plan(plan);
  const std::vector<CellStats> cells = aggregate(runs);
  write_outputs(runs, cells, out_dir);

  int failed = 0;
  for (const RunRecord& r : runs) failed += r.failed ? 1 : 0;
  std::printf("runs           %zu (%d failed)\n", runs.size(), failed);
  for (const CellStats& c : cells)
    std::printf("%-10s %-9s rate %-6g delay %10.4g +- %-10.4g hits %8.4g\n",
                c.topology.c_str(), c.strategy.c_str(), c.rate, c.delay_mean,
                c.delay_std, c.hits_mean);
  std::printf("wrote          %s\n", out_dir.c_str());
  return failed ? kExitViolation : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint forwarding and caching over named-data networks"};
  app.require_subcommand(1);

  app.add_subcommand("list-topologies", "print the built-in topology names");

  TopologyArgs solve_top;
  double solve_rate = -1;
  mindelay::SolveOptions solve_opt;
  std::string solve_out;
  CLI::App* solve = app.add_subcommand(
      "solve-fluid", "run the fluid relaxation to a stationary point");
  solve_top.attach(solve);
  solve->add_option("--rate", solve_rate, "requests/node/sec");
  solve->add_option("--max-iters", solve_opt.max_iterations, "iteration cap");
  solve->add_option("--step-size", solve_opt.step_size, "step toward the direction");
  solve->add_option("--tolerance", solve_opt.tolerance, "stationarity tolerance");
  solve->add_option("-o,--out", solve_out, "directory for trajectory and point");

  TopologyArgs check_top;
  std::string check_point;
  double check_tol = -1;
  CLI::App* check = app.add_subcommand(
      "check-conditions", "test a forwarding/caching point for stationarity");
  check_top.attach(check);
  check->add_option("--point", check_point, "point json to test")->required();
  check->add_option("--tolerance", check_tol, "relative slack");

  TopologyArgs sim_top;
  std::string sim_strategy = "mindelay";
  std::string sim_out;
  mindelay::SimConfig sim_config;
  CLI::App* sim = app.add_subcommand("simulate", "packet-level run of one strategy");
  sim_top.attach(sim);
  sim->add_option("-s,--strategy", sim_strategy, "mindelay, bp, lfum-pi, lfum-rtt");
  sim->add_option("--rate", sim_config.rate, "requests/node/sec");
  sim->add_option("--horizon", sim_config.horizon, "request generation window, sec");
  sim->add_option("--update-interval", sim_config.update_interval,
                  "table refresh period, sec");
  sim->add_option("--seed", sim_config.seed, "run seed");
  sim->add_option("--flow-estimator", sim_config.flow_estimator,
                  "interest or data: what the mindelay tables meter");
  sim->add_option("-o,--out", sim_out, "directory for per-request rows");

  TopologyArgs exp_top;  // only options reused; topologies listed separately
  std::string preset;
  std::vector<std::string> exp_topologies;
  std::vector<std::string> exp_strategies;
  std::vector<double> exp_rates;
  int exp_seeds = -1;
  double exp_horizon = -1, exp_interval = -1;
  std::string exp_out;
  CLI::App* exp = app.add_subcommand("experiment", "strategy sweep with tsv outputs");
  exp->add_option("--preset", preset, "desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  exp->add_option("-t,--topology", exp_topologies, "topologies to sweep");
  exp->add_option("-s,--strategy", exp_strategies, "strategies to sweep");
  exp->add_option("--rates", exp_rates, "request rates to sweep");
  exp->add_option("--seeds", exp_seeds, "number of seeds, starting at 1");
  exp->add_option("--horizon", exp_horizon, "request generation window, sec");
  exp->add_option("--update-interval", exp_interval, "table refresh period, sec");
  exp->add_option("--objects", exp_top.options.catalog_size, "catalog size override");
  exp->add_option("--cache-size", exp_top.options.cache_capacity,
                  "cache units at every caching node");
  exp->add_option("--link-capacity-mbps", exp_top.options.link_capacity_mbps,
                  "capacity override for all links");
  exp->add_option("-o,--out", exp_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-topologies")) return cmd_list_topologies();
    if (app.got_subcommand(solve))
      return cmd_solve_fluid(solve_top, solve_rate, solve_opt, solve_out);
    if (app.got_subcommand(check))
      return cmd_check_conditions(check_top, check_point, check_tol);
    if (app.got_subcommand(sim))
      return cmd_simulate(sim_top, sim_strategy, sim_config, sim_out);
    if (app.got_subcommand(exp)) {
      mindelay::ExperimentPlan plan =
          preset == "paper" ? mindelay::paper_preset() : mindelay::desk_preset();
      if (!exp_topologies.empty()) plan.topologies = exp_topologies;
      if (!exp_strategies.empty()) plan.strategies = exp_strategies;
      if (!exp_rates.empty()) plan.rates = exp_rates;
      if (exp_seeds > 0) {
        plan.seeds.assign(exp_seeds, 0);
        std::iota(plan.seeds.begin(), plan.seeds.end(), 1);
      }
      if (exp_horizon > 0) plan.horizon = exp_horizon;
      if (exp_interval > 0) plan.update_interval = exp_interval;
      if (exp_top.options.catalog_size > 0) {
        plan.options.catalog_size = exp_top.options.catalog_size;
        for (auto& [name, o] : plan.overrides)
          o.catalog_size = exp_top.options.catalog_size;
      }
      if (exp_top.options.cache_capacity >= 0) {
        plan.options.cache_capacity = exp_top.options.cache_capacity;
        for (auto& [name, o] : plan.overrides)
          o.cache_capacity = exp_top.options.cache_capacity;
      }
      if (exp_top.options.link_capacity_mbps > 0) {
        plan.options.link_capacity_mbps = exp_top.options.link_capacity_mbps;
        for (auto& [name, o] : plan.overrides)
          o.link_capacity_mbps = exp_top.options.link_capacity_mbps;
      }
      if (exp_out.empty()) {
        const char* env = std::getenv("MINDELAY_OUT_DIR");
        exp_out = env && *env ? env : "results";
      }
      return cmd_experiment(std::move(plan), exp_out);
    }
  } catch (const mindelay::LivelockError& e) {
    std::fprintf(stderr, "livelock: %s\n", e.what());
    return kExitLivelock;
  } catch (const mindelay::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
