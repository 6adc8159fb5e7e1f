#include "mindelay/topology.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mindelay/rng.hpp"

namespace mindelay {

namespace {

using nlohmann::json;

constexpr double kDefaultCapacityMbps = 50.0;
constexpr double kDefaultObjectKBytes = 500.0;
constexpr double kDefaultInterestKBytes = 1.25;

struct Builder {
  std::vector<int> ids;
  std::vector<std::tuple<int, int, double>> directed;  // external ids + bps
  std::unordered_map<int, int> cache_units;            // external id -> units
  int catalog = 5000;
  double object_bits = kDefaultObjectKBytes * 8000.0;
  double interest_bits = kDefaultInterestKBytes * 8000.0;

  explicit Builder(const TopologyOptions& opt) {
    if (opt.catalog_size > 0) catalog = opt.catalog_size;
  }
  Builder() = default;

  void edge(int a, int b, double bps) {
    directed.emplace_back(a, b, bps);
    directed.emplace_back(b, a, bps);
  }
};

NetworkGraph assemble(Builder& b) {
  NetworkGraph g;
  g.node_ids = b.ids;
  std::sort(g.node_ids.begin(), g.node_ids.end());
  if (std::adjacent_find(g.node_ids.begin(), g.node_ids.end()) != g.node_ids.end())
    throw ConfigError("duplicate node id");
  for (int i = 0; i < static_cast<int>(g.node_ids.size()); ++i)
    g.id_to_index[g.node_ids[i]] = i;

  const int n = g.node_count();
  g.out_links.resize(n);
  g.in_links.resize(n);
  std::set<std::pair<int, int>> seen;
  for (auto& [a, b, bps] : b.directed) {
    if (a == b) throw ConfigError("self-loop link");
    if (bps <= 0) throw ConfigError("link capacity must be positive");
    const int u = g.index_of(a), v = g.index_of(b);
    if (!seen.insert({u, v}).second) continue;  // keep the first definition
    g.out_links[u].push_back(static_cast<int>(g.links.size()));
    g.in_links[v].push_back(static_cast<int>(g.links.size()));
    g.links.push_back({u, v, bps});
  }
  g.reverse_link.assign(g.links.size(), -1);
  for (std::size_t e = 0; e < g.links.size(); ++e)
    g.reverse_link[e] = g.find_link(g.links[e].to, g.links[e].from);

  g.cache_capacity.assign(n, 0);
  for (auto& [id, units] : b.cache_units) {
    if (units < 0) throw ConfigError("negative cache capacity");
    g.cache_capacity[g.index_of(id)] = units;
  }
  g.catalog_size = b.catalog;
  g.object_size_bits = b.object_bits;
  g.interest_size_bits = b.interest_bits;
  return g;
}

void apply_source_rule(NetworkGraph& g, const std::string& rule,
                       const std::vector<int>& servers_ext, std::uint64_t seed,
                       int sources_per_object) {
  g.object_sources.assign(g.catalog_size, {});
  if (rule == "modulo") {
    for (int k = 0; k < g.catalog_size; ++k)
      g.object_sources[k] = {g.index_of(servers_ext[k % servers_ext.size()])};
  } else if (rule == "random_uniform") {
    RngStream rng("sources", seed);
    for (int k = 0; k < g.catalog_size; ++k) {
      std::set<int> picked;
      while (static_cast<int>(picked.size()) < sources_per_object)
        picked.insert(g.index_of(
            servers_ext[rng.next_below(servers_ext.size())]));
      g.object_sources[k].assign(picked.begin(), picked.end());
    }
  } else {
    throw ConfigError("unknown source assignment rule: " + rule);
  }
}

// one server per object from each half of the list, both chosen uniformly
void apply_two_pool_sources(NetworkGraph& g, const std::vector<int>& pool_a,
                            const std::vector<int>& pool_b, std::uint64_t seed) {
  RngStream rng("sources", seed);
  g.object_sources.assign(g.catalog_size, {});
  for (int k = 0; k < g.catalog_size; ++k) {
    int a = g.index_of(pool_a[rng.next_below(pool_a.size())]);
    int b = g.index_of(pool_b[rng.next_below(pool_b.size())]);
    if (a > b) std::swap(a, b);
    g.object_sources[k] = {a, b};
  }
}

void fill_range(std::vector<int>& v, int lo, int hi) {
  for (int i = lo; i <= hi; ++i) v.push_back(i);
}

Scenario make_abilene(const TopologyOptions& opt) {
  Builder b(opt);
  fill_range(b.ids, 1, 11);
  if (opt.link_capacity_mbps <= 0)
    throw ConfigError(
        "abilene has no built-in link capacity; pass an explicit one "
        "(link_capacity_mbps)");
  const double cap = opt.link_capacity_mbps * 1e6;
  for (auto [a, c] : std::initializer_list<std::pair<int, int>>{
           {1, 2}, {1, 4}, {2, 3}, {2, 4}, {3, 6}, {4, 5}, {5, 6},
           {5, 7}, {6, 9}, {7, 9}, {7, 8}, {8, 10}, {9, 11}, {10, 11}})
    b.edge(a, c, cap);
  for (int id : b.ids) b.cache_units[id] = 500;

  Scenario s;
  s.name = "abilene";
  s.graph = assemble(b);
  apply_source_rule(s.graph, "modulo", {1, 5, 8}, opt.assignment_seed, 1);
  fill_range(s.demand.requesters, 0, s.graph.node_count() - 1);
  return s;
}

Scenario make_geant(const TopologyOptions& opt) {
  Builder b(opt);
  fill_range(b.ids, 1, 22);
  const double cap =
      (opt.link_capacity_mbps > 0 ? opt.link_capacity_mbps : kDefaultCapacityMbps) * 1e6;
  for (auto [a, c] : std::initializer_list<std::pair<int, int>>{
           {1, 2},   {1, 3},   {1, 4},   {2, 3},   {2, 5},   {3, 6},
           {4, 7},   {5, 8},   {5, 9},   {6, 9},   {6, 10},  {7, 11},
           {8, 12},  {9, 13},  {10, 13}, {10, 14}, {11, 14}, {12, 15},
           {13, 16}, {14, 17}, {15, 18}, {16, 18}, {16, 19}, {17, 19},
           {17, 20}, {18, 21}, {19, 22}, {20, 22}, {21, 22}, {4, 6},
           {7, 14},  {12, 16}, {20, 21}})
    b.edge(a, c, cap);
  for (int id : b.ids) b.cache_units[id] = 500;

  Scenario s;
  s.name = "geant";
  s.graph = assemble(b);
  std::vector<int> all = b.ids;
  apply_source_rule(s.graph, "random_uniform", all, opt.assignment_seed, 1);
  fill_range(s.demand.requesters, 0, s.graph.node_count() - 1);
  return s;
}

Scenario make_dtelekom(const TopologyOptions& opt) {
  Builder b(opt);
  fill_range(b.ids, 1, 68);
  const double cap =
      (opt.link_capacity_mbps > 0 ? opt.link_capacity_mbps : kDefaultCapacityMbps) * 1e6;

  std::set<std::pair<int, int>> edges;
  auto add = [&](int a, int c) {
    if (a > c) std::swap(a, c);
    return a != c && edges.insert({a, c}).second;
  };
  for (int i = 1; i <= 68; ++i) add(i, i % 68 + 1);
  // deterministic chord fill, independent of any run seed
  RngStream wiring("dtelekom-wiring", 68);
  while (edges.size() < 273) {
    int a = 1 + static_cast<int>(wiring.next_below(68));
    int c = 1 + static_cast<int>(wiring.next_below(68));
    add(a, c);
  }
  for (auto& [a, c] : edges) b.edge(a, c, cap);
  for (int id : b.ids) b.cache_units[id] = 500;

  Scenario s;
  s.name = "dtelekom";
  s.graph = assemble(b);
  std::vector<int> all = b.ids;
  apply_source_rule(s.graph, "random_uniform", all, opt.assignment_seed, 1);
  fill_range(s.demand.requesters, 0, s.graph.node_count() - 1);
  return s;
}

// Four consumers under two edge routers, one spine node, two servers:
//   1..4 = leaves, 5/6 = edge, 7 = spine, 8/9 = servers.
Scenario make_tree(const TopologyOptions& opt) {
  Builder b(opt);
  fill_range(b.ids, 1, 9);
  const double cap =
      (opt.link_capacity_mbps > 0 ? opt.link_capacity_mbps : kDefaultCapacityMbps) * 1e6;
  for (auto [a, c] : std::initializer_list<std::pair<int, int>>{
           {1, 5}, {2, 5}, {3, 6}, {4, 6}, {5, 7}, {6, 7}, {7, 8}, {7, 9}})
    b.edge(a, c, cap);
  for (int id = 1; id <= 7; ++id) b.cache_units[id] = 250;

  Scenario s;
  s.name = "tree";
  s.graph = assemble(b);
  apply_source_rule(s.graph, "random_uniform", {8, 9}, opt.assignment_seed, 1);
  fill_range(s.demand.requesters, 0, 3);
  return s;
}

// Two rails of four nodes with rungs, one extra requester hanging off the
// top pair and the single server hanging off the bottom pair:
//   1/2 = rail heads, 3 = side requester, 4..9 = rail body, 10 = server.
Scenario make_ladder(const TopologyOptions& opt) {
  Builder b(opt);
  fill_range(b.ids, 1, 10);
  const double cap =
      (opt.link_capacity_mbps > 0 ? opt.link_capacity_mbps : kDefaultCapacityMbps) * 1e6;
  for (auto [a, c] : std::initializer_list<std::pair<int, int>>{
           {1, 4}, {4, 6}, {6, 8}, {2, 5}, {5, 7}, {7, 9},
           {4, 5}, {6, 7}, {8, 9}, {3, 1}, {3, 2}, {10, 8}, {10, 9}})
    b.edge(a, c, cap);
  for (int id = 1; id <= 9; ++id) b.cache_units[id] = 250;

  Scenario s;
  s.name = "ladder";
  s.graph = assemble(b);
  s.graph.object_sources.assign(s.graph.catalog_size, {s.graph.index_of(10)});
  s.demand.requesters = {s.graph.index_of(1), s.graph.index_of(2),
                         s.graph.index_of(3)};
  return s;
}

// k=4 fat tree, requests entering at the cores: 1..4 = core, 5..12 = agg,
// 13..20 = edge, 21..36 = servers (two per edge router). Every object lives
// on one server from each half of the server pool.
Scenario make_fattree(const TopologyOptions& opt) {
  Builder b(opt);
  fill_range(b.ids, 1, 36);
  const double cap =
      (opt.link_capacity_mbps > 0 ? opt.link_capacity_mbps : kDefaultCapacityMbps) * 1e6;
  for (int p = 0; p < 4; ++p) {
    const int agg1 = 5 + 2 * p, agg2 = 6 + 2 * p;
    const int edge1 = 13 + 2 * p, edge2 = 14 + 2 * p;
    b.edge(agg1, edge1, cap);
    b.edge(agg1, edge2, cap);
    b.edge(agg2, edge1, cap);
    b.edge(agg2, edge2, cap);
    b.edge(1, agg1, cap);
    b.edge(2, agg1, cap);
    b.edge(3, agg2, cap);
    b.edge(4, agg2, cap);
  }
  for (int i = 0; i < 8; ++i) {
    b.edge(13 + i, 21 + 2 * i, cap);
    b.edge(13 + i, 22 + 2 * i, cap);
  }
  for (int id = 1; id <= 20; ++id) b.cache_units[id] = 250;

  Scenario s;
  s.name = "fattree";
  s.graph = assemble(b);
  std::vector<int> pool_a, pool_b;
  fill_range(pool_a, 21, 28);
  fill_range(pool_b, 29, 36);
  apply_two_pool_sources(s.graph, pool_a, pool_b, opt.assignment_seed);
  fill_range(s.demand.requesters, 0, 3);
  return s;
}

void apply_overrides(Scenario& s, const TopologyOptions& opt) {
  if (opt.cache_capacity >= 0)
    for (auto& c : s.graph.cache_capacity)
      if (c > 0) c = opt.cache_capacity;
  if (opt.rate_per_node > 0) s.demand.rate_per_node = opt.rate_per_node;
  if (opt.zipf_alpha > 0) s.demand.zipf_alpha = opt.zipf_alpha;
}

Scenario load_json(const std::string& path, const TopologyOptions& opt) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open topology file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("bad topology json (" + path + "): " + e.what());
  }

  Builder b(opt);
  try {
    for (auto& v : doc.at("nodes")) b.ids.push_back(v.get<int>());
    for (auto& l : doc.at("links")) {
      double mbps = opt.link_capacity_mbps > 0
                        ? opt.link_capacity_mbps
                        : l.at("capacity_mbps").get<double>();
      int from = l.at("from").get<int>(), to = l.at("to").get<int>();
      if (l.value("bidirectional", true))
        b.edge(from, to, mbps * 1e6);
      else
        b.directed.emplace_back(from, to, mbps * 1e6);
    }
    if (doc.contains("caches"))
      for (auto& [id, units] : doc.at("caches").items())
        b.cache_units[std::stoi(id)] = units.get<int>();

    const json& cat = doc.at("catalog");
    if (opt.catalog_size <= 0) b.catalog = cat.at("count").get<int>();
    b.object_bits = cat.value("size_kbytes", kDefaultObjectKBytes) * 8000.0;
    if (doc.contains("demand"))
      b.interest_bits =
          doc["demand"].value("interest_size_kbytes", kDefaultInterestKBytes) * 8000.0;

    Scenario s;
    s.name = doc.value("name", path);
    s.graph = assemble(b);

    const std::string rule = cat.value("source_assignment", "explicit");
    if (rule == "explicit") {
      s.graph.object_sources.assign(b.catalog, {});
      for (auto& [obj, nodes] : cat.at("sources").items()) {
        const int k = std::stoi(obj) - 1;  // objects are 1-based in files
        if (k < 0 || k >= b.catalog) throw ConfigError("source for unknown object");
        for (auto& v : nodes) s.graph.object_sources[k].push_back(s.graph.index_of(v.get<int>()));
        std::sort(s.graph.object_sources[k].begin(), s.graph.object_sources[k].end());
      }
      for (int k = 0; k < b.catalog; ++k)
        if (s.graph.object_sources[k].empty())
          throw ConfigError("object " + std::to_string(k + 1) + " has no source");
    } else {
      std::vector<int> servers;
      if (cat.contains("servers"))
        for (auto& v : cat.at("servers")) servers.push_back(v.get<int>());
      else
        servers = s.graph.node_ids;
      apply_source_rule(s.graph, rule, servers, opt.assignment_seed, 1);
    }

    if (doc.contains("demand")) {
      const json& d = doc["demand"];
      if (d.contains("explicit")) {
        for (auto& r : d["explicit"])
          s.demand.explicit_rates.push_back(
              {s.graph.index_of(r.at("node").get<int>()),
               r.at("object").get<int>() - 1, r.at("rate").get<double>()});
        for (auto& r : s.demand.explicit_rates)
          if (r.object < 0 || r.object >= b.catalog || r.rate < 0)
            throw ConfigError("bad explicit demand entry");
      } else {
        if (d.contains("requesters"))
          for (auto& v : d["requesters"])
            s.demand.requesters.push_back(s.graph.index_of(v.get<int>()));
        s.demand.rate_per_node = d.value("rate_per_node", 1.0);
        s.demand.zipf_alpha = d.value("zipf_alpha", 0.75);
      }
    }
    if (s.demand.requesters.empty() && !s.demand.is_explicit())
      fill_range(s.demand.requesters, 0, s.graph.node_count() - 1);

    if (opt.cache_capacity >= 0)
      for (auto& c : s.graph.cache_capacity)
        if (c > 0) c = opt.cache_capacity;
    if (opt.rate_per_node > 0) s.demand.rate_per_node = opt.rate_per_node;
    if (opt.zipf_alpha > 0) s.demand.zipf_alpha = opt.zipf_alpha;
    return s;
  } catch (const json::exception& e) {
    throw ConfigError("bad topology json (" + path + "): " + e.what());
  }
}

}  // namespace

int NetworkGraph::index_of(int external_id) const {
  auto it = id_to_index.find(external_id);
  if (it == id_to_index.end())
    throw ConfigError("unknown node id: " + std::to_string(external_id));
  return it->second;
}

int NetworkGraph::find_link(int from, int to) const {
  for (int e : out_links[from])
    if (links[e].to == to) return e;
  return -1;
}

bool NetworkGraph::is_source(int node, int object) const {
  const auto& s = object_sources[object];
  return std::binary_search(s.begin(), s.end(), node);
}

std::vector<double> DemandConfig::rate_matrix(const NetworkGraph& g) const {
  const int n = g.node_count(), k = g.catalog_size;
  std::vector<double> r(static_cast<std::size_t>(n) * k, 0.0);
  if (is_explicit()) {
    for (const auto& e : explicit_rates)
      r[static_cast<std::size_t>(e.object) * n + e.node] += e.rate;
  } else {
    ZipfSampler zipf(k, zipf_alpha);
    for (int obj = 0; obj < k; ++obj) {
      const double rk = rate_per_node * zipf.pmf(obj);
      for (int node : requesters) r[static_cast<std::size_t>(obj) * n + node] = rk;
    }
  }
  return r;
}

Scenario make_scenario(const ScenarioSpec& spec) {
  Builder b;
  b.ids = spec.nodes;
  for (const auto& e : spec.edges) b.edge(e.a, e.b, e.capacity_mbps * 1e6);
  for (auto& [id, units] : spec.caches) b.cache_units[id] = units;
  b.catalog = static_cast<int>(spec.sources.size());
  if (b.catalog == 0) throw ConfigError("scenario needs at least one object");
  b.object_bits = spec.object_kbytes * 8000.0;
  b.interest_bits = spec.interest_kbytes * 8000.0;

  Scenario s;
  s.name = spec.name;
  s.graph = assemble(b);
  s.graph.object_sources.assign(b.catalog, {});
  for (int k = 0; k < b.catalog; ++k) {
    if (spec.sources[k].empty())
      throw ConfigError("object " + std::to_string(k + 1) + " has no source");
    for (int id : spec.sources[k])
      s.graph.object_sources[k].push_back(s.graph.index_of(id));
    std::sort(s.graph.object_sources[k].begin(), s.graph.object_sources[k].end());
  }
  for (auto& [id, obj, rate] : spec.rates) {
    if (obj < 0 || obj >= b.catalog || rate < 0)
      throw ConfigError("bad demand entry");
    s.demand.explicit_rates.push_back({s.graph.index_of(id), obj, rate});
  }
  return s;
}

std::vector<std::string> builtin_topologies() {
  return {"abilene", "geant", "dtelekom", "tree", "ladder", "fattree"};
}

bool is_builtin_topology(const std::string& name) {
  const auto names = builtin_topologies();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario load_topology(const std::string& name_or_path, const TopologyOptions& opt) {
  Scenario s;
  if (name_or_path == "abilene") s = make_abilene(opt);
  else if (name_or_path == "geant") s = make_geant(opt);
  else if (name_or_path == "dtelekom") s = make_dtelekom(opt);
  else if (name_or_path == "tree") s = make_tree(opt);
  else if (name_or_path == "ladder") s = make_ladder(opt);
  else if (name_or_path == "fattree") s = make_fattree(opt);
  else return load_topology_file(name_or_path, opt);
  apply_overrides(s, opt);
  return s;
}

Scenario load_topology_file(const std::string& path, const TopologyOptions& opt) {
  return load_json(path, opt);
}

}  // namespace mindelay
