#pragma once

// Round-based parallel learning. A long nb-ll run is split into rounds of
// `workers` independent sub-simulations. Every worker starts from an empty
// network and from the global counters frozen at the start of the round,
// learns online from its own arrivals, and returns the counts it added. The
// coordinator folds all deltas into the global state before the next round.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nbll/engine.hpp"
#include "nbll/learner.hpp"

namespace nbll {

struct RoundPlan {
  std::uint32_t workers = 1;
  std::uint64_t events_per_subsim = 1;
  std::uint32_t rounds = 1;
  std::uint64_t base_seed = 1;

  std::uint64_t total_events() const { return std::uint64_t{workers} * events_per_subsim * rounds; }
};

/// Throws ConfigError (naming the nearest valid totals) unless `total_events`
/// is a positive multiple of workers * events_per_subsim.
RoundPlan plan_rounds(std::uint64_t total_events, std::uint32_t workers, std::uint64_t events_per_subsim,
                      std::uint64_t base_seed = 1);

/// Traffic seed of worker `worker` in round `round`.
std::uint64_t worker_seed(std::uint64_t base_seed, std::uint32_t round, std::uint32_t worker);

struct WorkerTask {
  std::uint32_t round = 0;
  std::uint32_t worker = 0;
  SimConfig config;  // seed and num_events already set for this worker
};

struct WorkerResult {
  std::uint32_t round = 0;
  std::uint32_t worker = 0;
  BayesCounters delta;
  Metrics metrics;

  std::string to_json() const;
  static WorkerResult from_json(const std::string& text);
};

/// Runs one sub-simulation. The default runs in-process; the CLI substitutes a
/// runner that launches worker processes and exchanges checkpoint files.
using WorkerRunner =
    std::function<WorkerResult(const WorkerTask&, const BayesCounters& global, const Scenario&, const RouteCatalog&)>;

WorkerResult run_worker(const WorkerTask& task, const BayesCounters& global, const Scenario& scenario,
                        const RouteCatalog& catalog);

/// A worker failed; the round was discarded without merging anything.
class WorkerFailure : public std::runtime_error {
 public:
  WorkerFailure(std::uint32_t round, std::uint32_t worker, const std::string& what);
  std::uint32_t round() const { return round_; }
  std::uint32_t worker() const { return worker_; }

 private:
  std::uint32_t round_;
  std::uint32_t worker_;
};

struct ParallelOptions {
  /// Concurrent workers; 0 means one thread per hardware core.
  unsigned threads = 0;
  WorkerRunner runner;  // empty: run_worker
  std::ostream* progress = nullptr;
  /// Tail histogram size for the whole run; collected from the final round.
  std::uint64_t histogram_tail = 0;
};

struct RoundOutcome {
  std::vector<WorkerResult> results;  // ordered by worker index
  BayesCounters global;
  double seconds = 0.0;
};

/// `config` supplies policy, alpha and the window; its seed and num_events
/// are replaced per worker.
RoundOutcome run_round(const RoundPlan& plan, std::uint32_t round, const BayesCounters& global,
                       const Scenario& scenario, const RouteCatalog& catalog, const SimConfig& config,
                       const ParallelOptions& options = {});

struct CurvePoint {
  std::uint64_t cumulative_arrivals = 0;
  WindowSample window;
};

struct RoundSummary {
  std::uint32_t round = 0;
  std::uint64_t cumulative_arrivals = 0;
  std::uint64_t cumulative_blocked = 0;
  double seconds = 0.0;

  double blocking_probability() const {
    return cumulative_arrivals ? static_cast<double>(cumulative_blocked) / cumulative_arrivals : 0.0;
  }
};

struct ParallelResult {
  Metrics aggregate;
  BayesCounters counters;
  std::vector<RoundSummary> rounds;
  /// Per round, window w summed over workers.
  std::vector<CurvePoint> curve;
};

ParallelResult run_parallel_learning(const RoundPlan& plan, const Scenario& scenario, const RouteCatalog& catalog,
                                     const SimConfig& config, const ParallelOptions& options = {},
                                     std::optional<BayesCounters> initial = std::nullopt);

}  // namespace nbll
