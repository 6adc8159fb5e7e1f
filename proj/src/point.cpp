#include "mindelay/point.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace mindelay {

using nlohmann::json;

ForwardingCachingPoint uniform_point(const NetworkGraph& g, const RoutingGraph& r) {
  ForwardingCachingPoint p;
  p.phi.assign(r.phi_size(), 0.0);
  p.rho.assign(static_cast<std::size_t>(g.catalog_size) * g.node_count(), 0.0);
  for (int k = 0; k < g.catalog_size; ++k) {
    const RoutingSlice& s = r.slice(k);
    for (int i = 0; i < g.node_count(); ++i) {
      const int deg = s.arc_count(i);
      for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a)
        p.phi[r.phi_offset[k] + a] = 1.0 / deg;
    }
  }
  return p;
}

void validate_point(const NetworkGraph& g, const RoutingGraph& r,
                    const ForwardingCachingPoint& p, double tol) {
  const int n = g.node_count();
  if (p.phi.size() != r.phi_size() ||
      p.rho.size() != static_cast<std::size_t>(g.catalog_size) * n)
    throw ConfigError("point has wrong dimensions for this topology");

  for (int k = 0; k < g.catalog_size; ++k) {
    const RoutingSlice& s = r.slice(k);
    for (int i = 0; i < n; ++i) {
      const int deg = s.arc_count(i);
      if (deg == 0) continue;
      double sum = 0.0;
      for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a) {
        const double v = p.phi[r.phi_offset[k] + a];
        if (v < -tol || v > 1 + tol || std::isnan(v))
          throw ConfigError("phi out of [0,1] at node " +
                            std::to_string(g.node_ids[i]) + " object " +
                            std::to_string(k + 1));
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol)
        throw ConfigError("phi row does not sum to 1 at node " +
                          std::to_string(g.node_ids[i]) + " object " +
                          std::to_string(k + 1));
    }
  }
  for (int i = 0; i < n; ++i) {
    double used = 0.0;
    for (int k = 0; k < g.catalog_size; ++k) {
      const double v = p.rho_at(n, k, i);
      if (v < -tol || v > 1 + tol || std::isnan(v))
        throw ConfigError("rho out of [0,1] at node " +
                          std::to_string(g.node_ids[i]));
      used += v;
    }
    if (used > g.cache_capacity[i] + tol)
      throw ConfigError("cache overcommitted at node " +
                        std::to_string(g.node_ids[i]));
  }
}

ForwardingCachingPoint load_point(const std::string& path, const NetworkGraph& g,
                                  const RoutingGraph& r) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open point file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("bad point json (" + path + "): " + e.what());
  }

  ForwardingCachingPoint p = uniform_point(g, r);
  try {
    if (doc.contains("phi")) {
      for (auto& row : doc["phi"]) {
        const int i = g.index_of(row.at("node").get<int>());
        const int k = row.at("object").get<int>() - 1;
        if (k < 0 || k >= g.catalog_size) throw ConfigError("phi for unknown object");
        const RoutingSlice& s = r.slice(k);
        for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a)
          p.phi[r.phi_offset[k] + a] = 0.0;
        for (auto& [hop, v] : row.at("split").items()) {
          const int j = g.index_of(std::stoi(hop));
          int slot = -1;
          for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a)
            if (s.arc_to[a] == j) slot = a;
          if (slot < 0)
            throw ConfigError("split names a non-next-hop: node " + hop);
          p.phi[r.phi_offset[k] + slot] = v.get<double>();
        }
      }
    }
    if (doc.contains("rho")) {
      for (auto& row : doc["rho"]) {
        const int i = g.index_of(row.at("node").get<int>());
        const int k = row.at("object").get<int>() - 1;
        if (k < 0 || k >= g.catalog_size) throw ConfigError("rho for unknown object");
        p.rho[static_cast<std::size_t>(k) * g.node_count() + i] =
            row.at("value").get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("bad point json (" + path + "): " + e.what());
  }
  validate_point(g, r, p);
  return p;
}

void save_point(const std::string& path, const NetworkGraph& g,
                const RoutingGraph& r, const ForwardingCachingPoint& p) {
  json phi = json::array(), rho = json::array();
  const int n = g.node_count();
  for (int k = 0; k < g.catalog_size; ++k) {
    const RoutingSlice& s = r.slice(k);
    for (int i = 0; i < n; ++i) {
      if (s.arc_count(i) == 0) continue;
      json split = json::object();
      for (int a = s.arc_offset[i]; a < s.arc_offset[i + 1]; ++a)
        split[std::to_string(g.node_ids[s.arc_to[a]])] =
            p.phi[r.phi_offset[k] + a];
      phi.push_back({{"node", g.node_ids[i]}, {"object", k + 1}, {"split", split}});
      const double v = p.rho_at(n, k, i);
      if (v != 0.0)
        rho.push_back({{"node", g.node_ids[i]}, {"object", k + 1}, {"value", v}});
    }
  }
  json doc = {{"phi", phi}, {"rho", rho}};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write point file: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace mindelay
