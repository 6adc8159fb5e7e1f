#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mindelay/routing.hpp"
#include "mindelay/topology.hpp"

namespace mindelay {

// One exogenous request: a node asks for an object at a point in time. The
// nonce tells apart simultaneous requests for the same object, since there is
// no Interest aggregation anywhere.
struct Request {
  double created = 0.0;
  int object = 0;
  int requester = 0;  // dense node index
  std::uint64_t nonce = 0;
};

// Poisson arrivals per requester over [0, horizon), objects drawn from the
// demand's zipf law, merged into one time-sorted list. Each requester owns a
// labeled rng stream, so the draw order of one node never shifts another's.
std::vector<Request> generate_requests(const NetworkGraph& g,
                                       const DemandConfig& demand, double rate,
                                       double horizon, std::uint64_t seed);

// Per-node decisions the engine delegates. Handlers observe traffic through
// the on_* hooks and own whatever state they need; the event loop is single
// threaded, so no locking anywhere. pick_next_hop returns a flat arc slot of
// the object's slice; pick_eviction returns the cached object to displace, or
// -1 to leave the cache alone (only consulted when the cache is full, since a
// cache with room always admits).
class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual int pick_next_hop(int node, int object, double now) = 0;
  virtual int pick_eviction(int node, int object, double now) = 0;

  virtual void on_interval(double /*now*/) {}
  virtual void on_request_generated(int /*node*/, int /*object*/) {}
  virtual void on_interest_received(int /*node*/, int /*object*/,
                                    int /*from_node*/) {}
  virtual void on_interest_forwarded(int /*node*/, int /*object*/, int /*arc*/,
                                     double /*now*/) {}
  virtual void on_data_received(int /*node*/, int /*object*/, int /*from_node*/,
                                double /*pit_created*/, double /*forwarded_at*/,
                                double /*now*/) {}
  virtual void on_object_cached(int /*node*/, int /*object*/) {}
  virtual void on_object_evicted(int /*node*/, int /*object*/) {}
};

struct SimConfig {
  double rate = 1.0;  // requests/node/sec at every requester
  double horizon = 100.0;
  double update_interval = 3.0;
  std::uint64_t seed = 1;
  std::string flow_estimator = "interest";  // or "data": what mindelay meters
  double livelock_wall_seconds = 120.0;     // wall clock, not sim time
  bool collect_requests = false;  // keep per-request rows in the result
};

// Counters the paper's metrics read off, plus anomaly counters that stay zero
// in valid runs and a running hash of every processed event for determinism
// checks.
struct SimMetrics {
  std::uint64_t generated = 0;
  std::uint64_t fulfilled = 0;
  std::uint64_t cache_hits = 0;
  double total_delay = 0.0;  // sum over fulfilled requests, seconds

  std::uint64_t fib_drops = 0;         // interest at a non-source with no hop
  std::uint64_t orphan_data = 0;       // data without a matching pit entry
  std::uint64_t nonce_collisions = 0;  // duplicate (object, nonce) in flight

  std::uint64_t events = 0;
  double end_time = 0.0;
  std::uint64_t trace_hash = 0xcbf29ce484222325ULL;

  std::uint64_t anomalies() const {
    return fib_drops + orphan_data + nonce_collisions;
  }
};

struct FulfilledRequest {
  double created = 0.0;
  double fulfilled = 0.0;
  int object = 0;
  int requester = 0;
};

struct CacheHitEvent {
  double time = 0.0;
  int node = 0;
  int object = 0;
};

struct SimResult {
  SimMetrics metrics;
  std::vector<std::vector<int>> final_cache;  // per node, sorted object ids
  std::vector<FulfilledRequest> requests;     // only when collect_requests
  std::vector<CacheHitEvent> hits;            // only when collect_requests
};

// Raised when the event loop burns wall clock without retiring outstanding
// requests; a correct run always drains, so hitting this means a strategy or
// engine bug rather than a slow scenario.
struct LivelockError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs generation plus drain: requests stop at the horizon, the loop keeps
// going until every outstanding request is fulfilled. Interval ticks fire at
// multiples of update_interval for as long as anything is outstanding.
SimResult run_simulation(const NetworkGraph& g, const RoutingGraph& r,
                         const DemandConfig& demand, Strategy& strategy,
                         const SimConfig& config);

// Built-in strategy pairs by name: mindelay, bp, lfum-pi, lfum-rtt.
std::unique_ptr<Strategy> make_strategy(const std::string& name,
                                        const NetworkGraph& g,
                                        const RoutingGraph& r,
                                        const SimConfig& config);

const std::vector<std::string>& strategy_names();

}  // namespace mindelay
