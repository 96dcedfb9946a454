#include "nbll/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "nbll/errors.hpp"
#include "nbll/random.hpp"

namespace nbll {

void SimConfig::validate() const {
  if (num_events < 1) throw ConfigError("num_events must be >= 1");
  if (capacity_range) {
    if (capacity_range->first < 1) throw ConfigError("capacity range lower bound must be >= 1");
    if (capacity_range->second < capacity_range->first) throw ConfigError("capacity range is empty");
  }
  if (!(load_interval >= 0.0)) throw ConfigError("load interval must be >= 0");
  if (!(load_base > 0.0 || load_interval > 0.0)) throw ConfigError("pair loads must be positive");
  if (!(load_base >= 0.0)) throw ConfigError("load base must be >= 0");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (policy.kind == PolicyKind::LeastLoadedHopLimit && policy.delta_max && *policy.delta_max < 0)
    throw ConfigError("extra-hop limit must be >= 0");
}

double TrafficMatrix::total() const { return std::accumulate(load.begin(), load.end(), 0.0); }

Scenario sample_scenario(const SimConfig& config, const Topology& topo) {
  config.validate();
  Rng rng(config.effective_scenario_seed(), stream::kScenario, 0);
  std::vector<int> capacity = topo.capacities();
  if (config.capacity_range) {
    for (int& w : capacity)
      w = static_cast<int>(rng.uniform_int(config.capacity_range->first, config.capacity_range->second));
  }
  TrafficMatrix traffic;
  traffic.load.resize(topo.pair_count());
  for (double& l : traffic.load) l = rng.uniform(config.load_base, config.load_base + config.load_interval);
  for (double l : traffic.load)
    if (!(l > 0.0)) throw ConfigError("sampled a non-positive pair load");
  return Scenario{topo.with_capacities(capacity), std::move(traffic)};
}

Metrics& Metrics::merge(const Metrics& other) {
  auto add = [](std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& from) {
    if (into.size() < from.size()) into.resize(from.size(), 0);
    for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
  };
  arrivals += other.arrivals;
  blocked += other.blocked;
  add(pair_arrivals, other.pair_arrivals);
  add(pair_blocked, other.pair_blocked);
  add(extra_hops, other.extra_hops);
  add(tail_extra_hops, other.tail_extra_hops);
  if (windows.size() < other.windows.size()) windows.resize(other.windows.size());
  for (std::size_t i = 0; i < other.windows.size(); ++i) {
    windows[i].arrivals += other.windows[i].arrivals;
    windows[i].blocked += other.windows[i].blocked;
  }
  return *this;
}

double average_extra_hops(std::span<const std::uint64_t> histogram) {
  std::uint64_t n = 0, weighted = 0;
  for (std::size_t d = 0; d < histogram.size(); ++d) {
    n += histogram[d];
    weighted += d * histogram[d];
  }
  return n ? static_cast<double>(weighted) / static_cast<double>(n) : 0.0;
}

void write_snapshot_csv(std::ostream& out, std::span<const SnapshotRecord> log, std::size_t link_count) {
  out << "arrival,pair,blocked";
  for (std::size_t j = 0; j < link_count; ++j) out << ",u" << j;
  out << '\n';
  for (const SnapshotRecord& r : log) {
    out << r.index << ',' << r.pair << ',' << (r.blocked ? 1 : 0);
    for (int u : r.used) out << ',' << u;
    out << '\n';
  }
}

void ConnectionTable::establish(Connection c, Occupancy& occ, std::span<const int> capacity) {
  if (!(c.departure > c.start)) throw ConsistencyError("connection must depart after it starts");
  if (live_.count(c.id)) throw ConsistencyError("connection id " + std::to_string(c.id) + " already live");
  occ.admit(c.route, capacity);
  const std::uint64_t id = c.id;
  live_.emplace(id, std::move(c));
}

void ConnectionTable::release(std::uint64_t id, Occupancy& occ) {
  auto it = live_.find(id);
  if (it == live_.end()) throw ConsistencyError("release of unknown connection " + std::to_string(id));
  occ.release(it->second.route);
  live_.erase(it);
}

bool ConnectionTable::audit(const Occupancy& occ) const {
  std::vector<int> expected(occ.size(), 0);
  for (const auto& [id, c] : live_)
    for (LinkId j : c.route.links) ++expected[j];
  return std::equal(expected.begin(), expected.end(), occ.used().begin(), occ.used().end());
}

namespace {

class Simulator {
 public:
  Simulator(const SimConfig& config, const Scenario& scenario, const RouteCatalog& catalog,
            std::optional<BayesCounters> learner)
      : config_(config),
        topo_(scenario.topology),
        traffic_(scenario.traffic),
        catalog_(catalog),
        capacity_(topo_.capacities()),
        keys_(capacity_),
        occ_(topo_.link_count()),
        learner_(std::move(learner)) {
    const std::size_t pairs = topo_.pair_count();
    arrival_rng_.reserve(pairs);
    holding_rng_.reserve(pairs);
    for (PairId p = 0; p < pairs; ++p) {
      arrival_rng_.emplace_back(config.seed, stream::kArrivals, p);
      holding_rng_.emplace_back(config.seed, stream::kHolding, p);
    }
    metrics_.pair_arrivals.assign(pairs, 0);
    metrics_.pair_blocked.assign(pairs, 0);
    metrics_.extra_hops.assign(static_cast<std::size_t>(catalog.max_hops()) + 1, 0);
    metrics_.tail_extra_hops.assign(metrics_.extra_hops.size(), 0);
    metrics_.windows.assign((config.num_events + config.window - 1) / config.window, WindowSample{});
    tail_start_ = config.histogram_tail && config.histogram_tail < config.num_events
                      ? config.num_events - config.histogram_tail
                      : 0;
  }

  SimResult run() {
    for (PairId p = 0; p < topo_.pair_count(); ++p)
      queue_.push(arrival_rng_[p].exponential(traffic_.load[p]), EventKind::Arrival, p);

    while (metrics_.arrivals < config_.num_events) {
      const Event e = queue_.pop();
      now_ = e.time;
      if (e.kind == EventKind::Departure) {
        connections_.release(e.subject, occ_);
      } else {
        arrive(static_cast<PairId>(e.subject));
      }
      if (config_.audit && !connections_.audit(occ_))
        throw ConsistencyError("link occupancy diverged from live connections");
    }
    return SimResult{std::move(metrics_), std::move(learner_), std::move(snapshots_)};
  }

 private:
  PolicyDecision decide(PairId pair) {
    switch (config_.policy.kind) {
      case PolicyKind::ShortestPath:
        eligible_routes(catalog_, pair, occ_, capacity_, eligible_);
        return select_sp(eligible_);
      case PolicyKind::LeastLoaded:
        return select_ll(topo_, occ_, pair, keys_);
      case PolicyKind::LeastLoadedHopLimit:
        eligible_routes(catalog_, pair, occ_, capacity_, eligible_);
        return select_ll_hoplimit(eligible_, catalog_, config_.policy.delta_max, occ_, capacity_, keys_);
      case PolicyKind::NaiveBayesLeastLoaded:
        eligible_routes(catalog_, pair, occ_, capacity_, eligible_);
        return nb_.select(eligible_, occ_, *learner_, config_.alpha);
    }
    throw ConfigError("unhandled policy");
  }

  void arrive(PairId pair) {
    const std::uint64_t index = metrics_.arrivals;
    const double holding = holding_rng_[pair].exponential(1.0);
    if (metrics_.arrivals + 1 < config_.num_events)
      queue_.push(now_ + arrival_rng_[pair].exponential(traffic_.load[pair]), EventKind::Arrival, pair);

    PolicyDecision decision = decide(pair);
    const bool blocked = decision.blocked();

    if (config_.snapshot_log) snapshots_.push_back(SnapshotRecord{index, pair, {occ_.used().begin(), occ_.used().end()}, blocked});
    if (learner_ && config_.policy.kind == PolicyKind::NaiveBayesLeastLoaded) learner_->observe(occ_, pair, blocked);

    ++metrics_.arrivals;
    ++metrics_.pair_arrivals[pair];
    WindowSample& w = metrics_.windows[index / config_.window];
    ++w.arrivals;
    if (blocked) {
      ++metrics_.blocked;
      ++metrics_.pair_blocked[pair];
      ++w.blocked;
      return;
    }

    const auto delta = static_cast<std::size_t>(extra_hops(*decision.route, catalog_));
    ++metrics_.extra_hops[delta];
    if (index >= tail_start_) ++metrics_.tail_extra_hops[delta];

    const std::uint64_t id = next_connection_++;
    queue_.push(now_ + holding, EventKind::Departure, id);
    connections_.establish(Connection{id, pair, std::move(*decision.route), now_, now_ + holding}, occ_, capacity_);
  }

  const SimConfig& config_;
  const Topology& topo_;
  const TrafficMatrix& traffic_;
  const RouteCatalog& catalog_;
  std::vector<int> capacity_;
  LoadKeys keys_;
  Occupancy occ_;
  std::optional<BayesCounters> learner_;
  std::vector<Rng> arrival_rng_;
  std::vector<Rng> holding_rng_;
  EventQueue queue_;
  ConnectionTable connections_;
  Metrics metrics_;
  std::vector<SnapshotRecord> snapshots_;
  std::vector<const Route*> eligible_;
  NbLlSelector nb_;
  double now_ = 0.0;
  std::uint64_t next_connection_ = 0;
  std::uint64_t tail_start_ = 0;
};

}  // namespace

SimResult run_simulation(const SimConfig& config, const Scenario& scenario, const RouteCatalog& catalog,
                         std::optional<BayesCounters> learner) {
  config.validate();
  const Topology& topo = scenario.topology;
  if (catalog.pair_count() != topo.pair_count() || catalog.link_count() != topo.link_count())
    throw ConfigError("route catalog was built for a different topology");
  if (scenario.traffic.load.size() != topo.pair_count())
    throw ConfigError("traffic matrix does not match topology pair count");
  for (double l : scenario.traffic.load)
    if (!(l > 0.0)) throw ConfigError("every pair load must be positive");
  if (config.policy.kind == PolicyKind::NaiveBayesLeastLoaded) {
    if (!learner) throw ConfigError("nb-ll needs a learner");
    if (learner->capacities() != topo.capacities() || learner->pair_count() != topo.pair_count())
      throw ConfigError("learner counters were built for a different topology");
  }
  Simulator sim(config, scenario, catalog, std::move(learner));
  return sim.run();
}

}  // namespace nbll
