#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mindelay/experiments.hpp"

using namespace mindelay;

namespace {

ExperimentPlan tiny_plan() {
  ExperimentPlan plan;
  plan.topologies = {"ladder", "tree"};
  plan.strategies = {"lfum-pi", "bp"};
  plan.rates = {0.5, 1.0};
  plan.seeds = {1, 2, 3};
  plan.horizon = 10.0;
  plan.update_interval = 3.0;
  plan.options.catalog_size = 20;
  plan.options.cache_capacity = 3;
  return plan;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("a plan expands to the full grid and aggregates per cell") {
  const ExperimentPlan plan = tiny_plan();
  const auto runs = run_plan(plan);
  REQUIRE(runs.size() == 2 * 2 * 2 * 3);

  // plan order: topology-major, then strategy, then rate, then seed
  std::size_t at = 0;
  for (const std::string& topo : plan.topologies)
    for (const std::string& strat : plan.strategies)
      for (double rate : plan.rates)
        for (std::uint64_t seed : plan.seeds) {
          const RunRecord& rec = runs[at++];
          CHECK(rec.topology == topo);
          CHECK(rec.strategy == strat);
          CHECK(rec.rate == rate);
          CHECK(rec.seed == seed);
          CHECK(!rec.failed);
          CHECK(rec.fulfilled == rec.generated);
          CHECK(rec.anomalies == 0);
          CHECK(rec.generated > 0);
          CHECK(rec.mean_delay > 0.0);
          CHECK(rec.mean_delay ==
                rec.total_delay / static_cast<double>(rec.fulfilled));
        }

  const auto cells = aggregate(runs);
  REQUIRE(cells.size() == 2 * 2 * 2);
  at = 0;
  for (const CellStats& cell : cells) {
    CHECK(cell.runs == 3);
    // recompute the moments from the raw rows
    double sum = 0.0, hits = 0.0;
    for (int s = 0; s < 3; ++s) {
      sum += runs[at + s].total_delay;
      hits += runs[at + s].cache_hit_rate;
    }
    const double mean = sum / 3.0;
    double var = 0.0;
    for (int s = 0; s < 3; ++s) {
      const double d = runs[at + s].total_delay - mean;
      var += d * d;
    }
    CHECK(cell.delay_mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(cell.delay_std ==
          doctest::Approx(std::sqrt(var / 2.0)).epsilon(1e-12));
    CHECK(cell.hits_mean == doctest::Approx(hits / 3.0).epsilon(1e-12));
    at += 3;
  }
}

TEST_CASE("the hit rate normalizes by nodes and horizon") {
  CHECK(cache_hit_rate(0, 10, 100.0) == 0.0);
  CHECK(cache_hit_rate(250, 10, 100.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(cache_hit_rate(7, 1, 1.0) == 7.0);
}

TEST_CASE("per-topology overrides shadow the base options") {
  ExperimentPlan plan = tiny_plan();
  TopologyOptions special = plan.options;
  special.cache_capacity = 9;
  plan.overrides["tree"] = special;

  CHECK(plan.options_for("ladder").cache_capacity == 3);
  CHECK(plan.options_for("tree").cache_capacity == 9);
  CHECK(plan.options_for("unheard-of").cache_capacity == 3);
}

TEST_CASE("output files are byte identical across reruns") {
  ExperimentPlan plan = tiny_plan();
  plan.topologies = {"ladder"};
  plan.seeds = {1, 2};

  const auto runs = run_plan(plan);
  const auto cells = aggregate(runs);

  const std::string dir_a = "out_exp_a_tmp";
  const std::string dir_b = "out_exp_b_tmp";
  write_outputs(runs, cells, dir_a);
  const auto rerun = run_plan(plan);
  write_outputs(rerun, aggregate(rerun), dir_b);

  for (const char* name : {"runs.tsv", "summary.tsv", "delay_vs_rate.tsv",
                           "hits_vs_rate.tsv"}) {
    const std::string a = slurp(dir_a + "/" + name);
    const std::string b = slurp(dir_b + "/" + name);
    CAPTURE(name);
    REQUIRE(!a.empty());
    CHECK(a == b);
    CHECK(line_count(a) >= 2);  // header plus at least one row
    CHECK(a.back() == '\n');
  }

  // sanity on shape: runs.tsv has one row per run plus the header
  CHECK(line_count(slurp(dir_a + "/runs.tsv")) == static_cast<int>(runs.size()) + 1);
  CHECK(line_count(slurp(dir_a + "/summary.tsv")) == static_cast<int>(cells.size()) + 1);

  for (const std::string& dir : {dir_a, dir_b})
    for (const char* name : {"runs.tsv", "summary.tsv", "delay_vs_rate.tsv",
                             "hits_vs_rate.tsv"})
      std::remove((dir + "/" + name).c_str());
}

TEST_CASE("presets cover the built-in catalog") {
  const ExperimentPlan desk = desk_preset();
  CHECK(desk.topologies.size() == 6);
  CHECK(desk.strategies.size() == 4);
  CHECK(!desk.rates.empty());
  CHECK(desk.seeds.size() == 10);
  CHECK(desk.options.catalog_size > 0);
  CHECK(desk.options_for("abilene").link_capacity_mbps > 0);  // abilene needs one

  const ExperimentPlan paper = paper_preset();
  CHECK(paper.topologies.size() == 6);
  CHECK(paper.horizon > desk.horizon);
  CHECK(paper.options_for("abilene").link_capacity_mbps > 0);
}
