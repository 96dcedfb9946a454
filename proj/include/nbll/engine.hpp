#pragma once

// Discrete-event simulation of a circuit-switched network.
//
// Each node pair has its own Poisson arrival stream and its own holding-time
// stream (mean holding time 1), keyed by (seed, pair). A holding time is drawn
// for every arrival, blocked or not, so the request sequence does not depend
// on the routing policy.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nbll/learner.hpp"
#include "nbll/occupancy.hpp"
#include "nbll/routing.hpp"
#include "nbll/topology.hpp"

namespace nbll {

struct SimConfig {
  std::uint64_t seed = 1;
  /// Seed of the capacity/load draw. Defaults to `seed`.
  std::optional<std::uint64_t> scenario_seed;
  std::uint64_t num_events = 1'000'000;
  Policy policy = Policy::sp();
  /// Uniform integer capacity range; unset keeps the topology's capacities.
  std::optional<std::pair<int, int>> capacity_range;
  double load_base = 0.45;
  double load_interval = 0.0;
  double alpha = 1e-6;
  bool snapshot_log = false;
  /// Arrivals per blocking-probability sample.
  std::uint64_t window = 100'000;
  /// When nonzero, the tail histogram covers only the last `histogram_tail` arrivals.
  std::uint64_t histogram_tail = 0;
  /// Check link conservation against the live-connection set after every event.
  bool audit = false;

  std::uint64_t effective_scenario_seed() const { return scenario_seed.value_or(seed); }
  void validate() const;
};

/// Offered load per node pair in erlang.
struct TrafficMatrix {
  std::vector<double> load;

  double total() const;
};

struct Scenario {
  Topology topology;
  TrafficMatrix traffic;
};

/// Draws link capacities and pair loads from the scenario stream.
Scenario sample_scenario(const SimConfig& config, const Topology& topo);

struct WindowSample {
  std::uint64_t arrivals = 0;
  std::uint64_t blocked = 0;

  double blocking_probability() const { return arrivals ? static_cast<double>(blocked) / arrivals : 0.0; }
  friend bool operator==(const WindowSample&, const WindowSample&) = default;
};

struct Metrics {
  std::uint64_t arrivals = 0;
  std::uint64_t blocked = 0;
  std::vector<std::uint64_t> pair_arrivals;
  std::vector<std::uint64_t> pair_blocked;
  /// Extra-hop count -> established connections, over the whole run.
  std::vector<std::uint64_t> extra_hops;
  /// Same, restricted to the configured tail of arrivals.
  std::vector<std::uint64_t> tail_extra_hops;
  std::vector<WindowSample> windows;

  std::uint64_t served() const { return arrivals - blocked; }
  double blocking_probability() const { return arrivals ? static_cast<double>(blocked) / arrivals : 0.0; }

  /// Elementwise sum; windows are summed by index.
  Metrics& merge(const Metrics& other);

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

double average_extra_hops(std::span<const std::uint64_t> histogram);

struct SnapshotRecord {
  std::uint64_t index = 0;
  PairId pair = 0;
  std::vector<int> used;
  bool blocked = false;
};

/// CSV: arrival,pair,blocked,u0,...,u{L-1}
void write_snapshot_csv(std::ostream& out, std::span<const SnapshotRecord> log, std::size_t link_count);

struct Connection {
  std::uint64_t id = 0;
  PairId pair = 0;
  Route route;
  double start = 0.0;
  double departure = 0.0;
};

/// Live connections and the occupancy they hold.
class ConnectionTable {
 public:
  void establish(Connection c, Occupancy& occ, std::span<const int> capacity);
  /// Frees one unit on every link of the connection. Throws ConsistencyError
  /// for an unknown id.
  void release(std::uint64_t id, Occupancy& occ);

  std::size_t size() const { return live_.size(); }
  bool contains(std::uint64_t id) const { return live_.count(id) != 0; }
  /// True when every link's occupancy equals the number of live connections on it.
  bool audit(const Occupancy& occ) const;

 private:
  std::unordered_map<std::uint64_t, Connection> live_;
};

enum class EventKind : std::uint8_t { Departure = 0, Arrival = 1 };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Arrival;
  std::uint64_t seq = 0;
  /// Pair for arrivals, connection id for departures.
  std::uint64_t subject = 0;
};

/// Pops in nondecreasing time; departures before arrivals at equal time,
/// then insertion order.
class EventQueue {
 public:
  void push(double time, EventKind kind, std::uint64_t subject) { heap_.push(Event{time, kind, next_seq_++, subject}); }
  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
  }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      if (x.time != y.time) return x.time > y.time;
      if (x.kind != y.kind) return x.kind > y.kind;
      return x.seq > y.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

struct SimResult {
  Metrics metrics;
  std::optional<BayesCounters> learner;
  std::vector<SnapshotRecord> snapshots;
};

/// Runs `config.num_events` arrivals on an initially empty network. The
/// learner is required for nb-ll, observes every arrival (served or blocked)
/// and is returned updated.
SimResult run_simulation(const SimConfig& config, const Scenario& scenario, const RouteCatalog& catalog,
                         std::optional<BayesCounters> learner = std::nullopt);

}  // namespace nbll
