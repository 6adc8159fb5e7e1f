#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace mindelay {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Link {
  int from = -1;  // dense node index
  int to = -1;
  double capacity_bps = 0.0;
};

struct NetworkGraph {
  std::vector<int> node_ids;  // dense index -> external id, ascending
  std::unordered_map<int, int> id_to_index;
  std::vector<Link> links;  // directed
  std::vector<std::vector<int>> out_links;  // per node: link indices
  std::vector<std::vector<int>> in_links;
  std::vector<int> reverse_link;  // per link: index of (to, from), -1 if absent

  std::vector<int> cache_capacity;  // per node, in whole objects
  std::vector<std::vector<int>> object_sources;  // per object: dense indices, sorted
  int catalog_size = 0;
  double object_size_bits = 0.0;
  double interest_size_bits = 10000.0;

  int node_count() const { return static_cast<int>(node_ids.size()); }
  int index_of(int external_id) const;  // throws ConfigError on unknown id
  int find_link(int from, int to) const;  // dense indices, -1 if absent
  bool is_source(int node, int object) const;
};

struct ExplicitRate {
  int node = -1;  // dense index
  int object = 0;
  double rate = 0.0;
};

struct DemandConfig {
  std::vector<int> requesters;  // dense indices
  double rate_per_node = 1.0;   // requests/sec, split over objects by the zipf law
  double zipf_alpha = 0.75;
  std::vector<ExplicitRate> explicit_rates;

  bool is_explicit() const { return !explicit_rates.empty(); }
  // expected rates r[k*N + i], the fluid-model view of this demand
  std::vector<double> rate_matrix(const NetworkGraph& g) const;
};

struct Scenario {
  NetworkGraph graph;
  DemandConfig demand;
  std::string name;
};

struct TopologyOptions {
  int catalog_size = -1;          // -1: keep the topology default
  int cache_capacity = -1;        // overrides every node that has a cache
  double link_capacity_mbps = -1; // overrides all links
  double rate_per_node = -1;
  double zipf_alpha = -1;
  std::uint64_t assignment_seed = 1;  // content placement for randomized topologies
};

// Accepts a built-in name (see builtin_topologies) or a path to a JSON file.
Scenario load_topology(const std::string& name_or_path,
                       const TopologyOptions& opt = {});
Scenario load_topology_file(const std::string& path, const TopologyOptions& opt = {});

// Programmatic construction, mainly for tests and generated instances.
// External node ids throughout; objects are 0-based; edges are bidirectional.
struct EdgeSpec {
  int a = 0;
  int b = 0;
  double capacity_mbps = 50.0;
};

struct ScenarioSpec {
  std::string name = "custom";
  std::vector<int> nodes;
  std::vector<EdgeSpec> edges;
  std::vector<std::pair<int, int>> caches;          // (node id, units)
  std::vector<std::vector<int>> sources;            // per object: node ids
  std::vector<std::tuple<int, int, double>> rates;  // (node id, object, rate)
  double object_kbytes = 500.0;
  double interest_kbytes = 1.25;
};

Scenario make_scenario(const ScenarioSpec& spec);

std::vector<std::string> builtin_topologies();
bool is_builtin_topology(const std::string& name);

}  // namespace mindelay
