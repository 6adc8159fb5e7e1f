#include "mindelay/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <queue>
#include <set>
#include <unordered_map>

#include "mindelay/rng.hpp"

namespace mindelay {

std::vector<Request> generate_requests(const NetworkGraph& g,
                                       const DemandConfig& demand, double rate,
                                       double horizon, std::uint64_t seed) {
  std::vector<Request> out;
  if (rate <= 0.0 || horizon <= 0.0) return out;
  const ZipfSampler zipf(g.catalog_size, demand.zipf_alpha);
  for (int i : demand.requesters) {
    RngStream rng("requests", seed, static_cast<std::uint64_t>(g.node_ids[i]));
    double t = rng.next_exponential(rate);
    while (t < horizon) {
      Request req;
      req.created = t;
      req.object = zipf.sample(rng);
      req.requester = i;
      req.nonce = rng.next_u64();
      out.push_back(req);
      t += rng.next_exponential(rate);
    }
  }
  std::sort(out.begin(), out.end(), [](const Request& a, const Request& b) {
    if (a.created != b.created) return a.created < b.created;
    if (a.requester != b.requester) return a.requester < b.requester;
    return a.nonce < b.nonce;
  });
  return out;
}

namespace {

enum EventKind : int { kRequest = 0, kInterest = 1, kData = 2, kTick = 3 };

struct Event {
  double time;
  std::uint64_t seq;
  int kind;
  int node;       // where the event lands
  int object;
  std::uint64_t nonce;
  int from_node;  // sender for packets, -1 for local submission
  double created;

  bool operator>(const Event& other) const {
    if (time != other.time) return time > other.time;
    return seq > other.seq;
  }
};

struct PitKey {
  int object;
  std::uint64_t nonce;
  bool operator==(const PitKey& o) const {
    return object == o.object && nonce == o.nonce;
  }
};

struct PitKeyHash {
  std::size_t operator()(const PitKey& k) const {
    return static_cast<std::size_t>(
        splitmix64(k.nonce ^ (static_cast<std::uint64_t>(k.object) << 1)));
  }
};

struct PitEntry {
  int in_node;  // -1: this node created the interest
  double created;
  double forwarded_at;
};

class Engine {
 public:
  Engine(const NetworkGraph& g, const RoutingGraph& r, Strategy& strategy,
         const SimConfig& config)
      : g_(g),
        r_(r),
        strategy_(strategy),
        config_(config),
        busy_until_(g.links.size(), 0.0),
        pit_(g.node_count()),
        cached_(g.node_count()) {}

  SimResult run(const std::vector<Request>& requests) {
    SimResult res;
    if (requests.empty()) {
      res.final_cache.resize(g_.node_count());
      return res;
    }
    const auto wall_start = std::chrono::steady_clock::now();
    for (const Request& req : requests)
      push({req.created, seq_++, kRequest, req.requester, req.object, req.nonce,
            -1, req.created});
    push({config_.update_interval, seq_++, kTick, -1, -1, 0, -1, 0.0});

    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      ++metrics_.events;
      fold(ev);
      if ((metrics_.events & 0xffff) == 0) {
        const std::chrono::duration<double> spent =
            std::chrono::steady_clock::now() - wall_start;
        if (spent.count() > config_.livelock_wall_seconds)
          throw LivelockError("no progress after " +
                              std::to_string(spent.count()) + "s wall clock, " +
                              std::to_string(outstanding_) + " outstanding");
      }
      switch (ev.kind) {
        case kRequest:
          ++metrics_.generated;
          ++outstanding_;
          strategy_.on_request_generated(ev.node, ev.object);
          on_interest(ev.node, ev.object, ev.nonce, -1, ev.created);
          break;
        case kInterest:
          on_interest(ev.node, ev.object, ev.nonce, ev.from_node, ev.created);
          break;
        case kData:
          on_data(ev.node, ev.object, ev.nonce, ev.from_node);
          break;
        case kTick:
          strategy_.on_interval(now_);
          if (now_ < config_.horizon || outstanding_ > 0)
            push({now_ + config_.update_interval, seq_++, kTick, -1, -1, 0, -1,
                  0.0});
          break;
      }
    }
    if (outstanding_ > 0)
      throw LivelockError("event queue drained with " +
                          std::to_string(outstanding_) + " outstanding");

    metrics_.end_time = now_;
    res.metrics = metrics_;
    res.final_cache.reserve(cached_.size());
    for (const auto& c : cached_) res.final_cache.emplace_back(c.begin(), c.end());
    res.requests = std::move(fulfilled_rows_);
    res.hits = std::move(hit_rows_);
    for (const auto& table : pit_)
      if (!table.empty())
        throw LivelockError("pit not empty at termination");
    return res;
  }

 private:
  void push(const Event& ev) { queue_.push(ev); }

  void fold(const Event& ev) {
    std::uint64_t h = metrics_.trace_hash;
    h = fnv1a_u64(static_cast<std::uint64_t>(ev.kind), h);
    h = fnv1a_u64(static_cast<std::uint64_t>(ev.node + 1), h);
    h = fnv1a_u64(static_cast<std::uint64_t>(ev.object + 1), h);
    h = fnv1a_u64(ev.nonce, h);
    h = fnv1a_u64(static_cast<std::uint64_t>(ev.from_node + 1), h);
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof ev.time);
    std::memcpy(&bits, &ev.time, sizeof bits);
    metrics_.trace_hash = fnv1a_u64(bits, h);
  }

  // serialize onto the link's FIFO and schedule the far-end arrival
  void transmit(int link, int kind, int object, std::uint64_t nonce,
                double created, double bits) {
    const Link& l = g_.links[link];
    const double start = std::max(now_, busy_until_[link]);
    const double done = start + bits / l.capacity_bps;
    busy_until_[link] = done;
    push({done, seq_++, kind, l.to, object, nonce, l.from, created});
  }

  void send_data(int node, int to_node, int object, std::uint64_t nonce,
                 double created) {
    const int link = g_.find_link(node, to_node);
    if (link < 0) throw std::logic_error("no reverse link for data");
    transmit(link, kData, object, nonce, created, g_.object_size_bits);
  }

  void fulfill(int node, int object, double created) {
    ++metrics_.fulfilled;
    --outstanding_;
    metrics_.total_delay += now_ - created;
    if (config_.collect_requests)
      fulfilled_rows_.push_back({created, now_, object, node});
  }

  void on_interest(int node, int object, std::uint64_t nonce, int from_node,
                   double created) {
    strategy_.on_interest_received(node, object, from_node);
    const RoutingSlice& s = r_.slice(object);

    const bool source = s.is_source(node);
    if (source || cached_[node].count(object)) {
      if (!source) {
        ++metrics_.cache_hits;
        if (config_.collect_requests) hit_rows_.push_back({now_, node, object});
      }
      if (from_node < 0)
        fulfill(node, object, created);  // served on the spot, no transmission
      else
        send_data(node, from_node, object, nonce, created);
      return;
    }

    if (s.arc_count(node) == 0) {
      ++metrics_.fib_drops;
      if (from_node < 0) --outstanding_;  // the request can never complete
      return;
    }
    const auto inserted =
        pit_[node].emplace(PitKey{object, nonce},
                           PitEntry{from_node, created, now_});
    if (!inserted.second) {
      ++metrics_.nonce_collisions;
      if (from_node < 0) --outstanding_;
      return;
    }
    const int arc = strategy_.pick_next_hop(node, object, now_);
    if (arc < s.arc_offset[node] || arc >= s.arc_offset[node + 1])
      throw std::logic_error("strategy returned a foreign arc");
    strategy_.on_interest_forwarded(node, object, arc, now_);
    transmit(s.arc_link[arc], kInterest, object, nonce, created,
             g_.interest_size_bits);
  }

  void on_data(int node, int object, std::uint64_t nonce, int from_node) {
    const RoutingSlice& s = r_.slice(object);

    // cache interaction first, then pit consumption
    if (!s.is_source(node) && !cached_[node].count(object) &&
        g_.cache_capacity[node] > 0) {
      if (static_cast<int>(cached_[node].size()) < g_.cache_capacity[node]) {
        cached_[node].insert(object);
        strategy_.on_object_cached(node, object);
      } else {
        const int victim = strategy_.pick_eviction(node, object, now_);
        if (victim >= 0) {
          if (!cached_[node].erase(victim))
            throw std::logic_error("strategy evicted an object not cached");
          strategy_.on_object_evicted(node, victim);
          cached_[node].insert(object);
          strategy_.on_object_cached(node, object);
        }
      }
    }

    const auto it = pit_[node].find(PitKey{object, nonce});
    if (it == pit_[node].end()) {
      ++metrics_.orphan_data;
      return;
    }
    const PitEntry entry = it->second;
    pit_[node].erase(it);
    strategy_.on_data_received(node, object, from_node, entry.created,
                               entry.forwarded_at, now_);
    if (entry.in_node < 0)
      fulfill(node, object, entry.created);
    else
      send_data(node, entry.in_node, object, nonce, entry.created);
  }

  const NetworkGraph& g_;
  const RoutingGraph& r_;
  Strategy& strategy_;
  const SimConfig& config_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  std::int64_t outstanding_ = 0;

  std::vector<double> busy_until_;
  std::vector<std::unordered_map<PitKey, PitEntry, PitKeyHash>> pit_;
  std::vector<std::set<int>> cached_;

  SimMetrics metrics_;
  std::vector<FulfilledRequest> fulfilled_rows_;
  std::vector<CacheHitEvent> hit_rows_;
};

}  // namespace

SimResult run_simulation(const NetworkGraph& g, const RoutingGraph& r,
                         const DemandConfig& demand, Strategy& strategy,
                         const SimConfig& config) {
  const std::vector<Request> requests = generate_requests(
      g, demand, config.rate, config.horizon, config.seed);
  Engine engine(g, r, strategy, config);
  return engine.run(requests);
}

}  // namespace mindelay
