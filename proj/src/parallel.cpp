#include "nbll/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "nbll/errors.hpp"
#include "nbll/random.hpp"

namespace nbll {

RoundPlan plan_rounds(std::uint64_t total_events, std::uint32_t workers, std::uint64_t events_per_subsim,
                      std::uint64_t base_seed) {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (events_per_subsim < 1) throw ConfigError("events per sub-simulation must be >= 1");
  const std::uint64_t per_round = std::uint64_t{workers} * events_per_subsim;
  if (total_events == 0 || total_events % per_round != 0) {
    const std::uint64_t below = total_events / per_round * per_round;
    const std::uint64_t above = below + per_round;
    std::string hint = below > 0 ? std::to_string(below) + " or " + std::to_string(above) : std::to_string(above);
    throw ConfigError("total events " + std::to_string(total_events) + " is not a multiple of workers x events (" +
                      std::to_string(per_round) + "); nearest valid totals: " + hint);
  }
  const std::uint64_t rounds = total_events / per_round;
  if (rounds > UINT32_MAX) throw ConfigError("too many rounds");
  return RoundPlan{workers, events_per_subsim, static_cast<std::uint32_t>(rounds), base_seed};
}

std::uint64_t worker_seed(std::uint64_t base_seed, std::uint32_t round, std::uint32_t worker) {
  return derive_seed(base_seed, stream::kWorker, (std::uint64_t{round} << 32) | worker);
}

WorkerFailure::WorkerFailure(std::uint32_t round, std::uint32_t worker, const std::string& what)
    : std::runtime_error("round " + std::to_string(round) + " worker " + std::to_string(worker) + " failed: " + what),
      round_(round),
      worker_(worker) {}

namespace {

using json = nlohmann::ordered_json;

json metrics_to_json(const Metrics& m) {
  json j;
  j["arrivals"] = m.arrivals;
  j["blocked"] = m.blocked;
  j["pair_arrivals"] = m.pair_arrivals;
  j["pair_blocked"] = m.pair_blocked;
  j["extra_hops"] = m.extra_hops;
  j["tail_extra_hops"] = m.tail_extra_hops;
  json w = json::array();
  for (const WindowSample& s : m.windows) w.push_back({s.arrivals, s.blocked});
  j["windows"] = std::move(w);
  return j;
}

Metrics metrics_from_json(const nlohmann::json& j) {
  Metrics m;
  m.arrivals = j.at("arrivals").get<std::uint64_t>();
  m.blocked = j.at("blocked").get<std::uint64_t>();
  m.pair_arrivals = j.at("pair_arrivals").get<std::vector<std::uint64_t>>();
  m.pair_blocked = j.at("pair_blocked").get<std::vector<std::uint64_t>>();
  m.extra_hops = j.at("extra_hops").get<std::vector<std::uint64_t>>();
  m.tail_extra_hops = j.at("tail_extra_hops").get<std::vector<std::uint64_t>>();
  for (const auto& s : j.at("windows")) m.windows.push_back({s.at(0).get<std::uint64_t>(), s.at(1).get<std::uint64_t>()});
  return m;
}

}  // namespace

std::string WorkerResult::to_json() const {
  json doc;
  doc["format"] = "nbll-worker-result";
  doc["version"] = 1;
  doc["round"] = round;
  doc["worker"] = worker;
  doc["metrics"] = metrics_to_json(metrics);
  doc["delta"] = json::parse(delta.to_json());
  return doc.dump() + "\n";
}

WorkerResult WorkerResult::from_json(const std::string& text) {
  try {
    auto doc = nlohmann::json::parse(text);
    if (doc.at("format") != "nbll-worker-result" || doc.at("version") != 1)
      throw ConfigError("not a worker result file");
    WorkerResult r;
    r.round = doc.at("round").get<std::uint32_t>();
    r.worker = doc.at("worker").get<std::uint32_t>();
    r.metrics = metrics_from_json(doc.at("metrics"));
    r.delta = BayesCounters::from_json(doc.at("delta").dump());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed worker result: ") + e.what());
  }
}

WorkerResult run_worker(const WorkerTask& task, const BayesCounters& global, const Scenario& scenario,
                        const RouteCatalog& catalog) {
  SimResult sim = run_simulation(task.config, scenario, catalog, global);
  WorkerResult out;
  out.round = task.round;
  out.worker = task.worker;
  out.delta = sim.learner->minus(global);
  out.metrics = std::move(sim.metrics);
  return out;
}

RoundOutcome run_round(const RoundPlan& plan, std::uint32_t round, const BayesCounters& global,
                       const Scenario& scenario, const RouteCatalog& catalog, const SimConfig& config,
                       const ParallelOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  std::vector<WorkerTask> tasks(plan.workers);
  for (std::uint32_t n = 0; n < plan.workers; ++n) {
    tasks[n].round = round;
    tasks[n].worker = n;
    tasks[n].config = config;
    tasks[n].config.policy = Policy::nb_ll();
    tasks[n].config.seed = worker_seed(plan.base_seed, round, n);
    tasks[n].config.num_events = plan.events_per_subsim;
    tasks[n].config.snapshot_log = false;
  }
  const WorkerRunner runner = options.runner ? options.runner : WorkerRunner(run_worker);

  std::vector<std::optional<WorkerResult>> slots(plan.workers);
  std::vector<std::exception_ptr> errors(plan.workers);
  std::atomic<std::uint32_t> next{0};
  auto drain = [&] {
    for (std::uint32_t n = next++; n < plan.workers; n = next++) {
      try {
        slots[n] = runner(tasks[n], global, scenario, catalog);
      } catch (...) {
        errors[n] = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, plan.workers);
  if (threads <= 1) {
    drain();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(drain);
  }

  for (std::uint32_t n = 0; n < plan.workers; ++n) {
    if (!errors[n]) continue;
    try {
      std::rethrow_exception(errors[n]);
    } catch (const std::exception& e) {
      throw WorkerFailure(round, n, e.what());
    } catch (...) {
      throw WorkerFailure(round, n, "unknown error");
    }
  }

  RoundOutcome out;
  out.global = global;
  out.results.reserve(plan.workers);
  for (std::uint32_t n = 0; n < plan.workers; ++n) {
    WorkerResult& r = *slots[n];
    if (r.delta.arrivals() != plan.events_per_subsim || r.metrics.arrivals != plan.events_per_subsim)
      throw WorkerFailure(round, n, "returned an incomplete sub-simulation");
    if (!r.delta.compatible(global)) throw WorkerFailure(round, n, "returned counters for another topology");
    out.results.push_back(std::move(r));
  }
  for (const WorkerResult& r : out.results) out.global.merge(r.delta);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

ParallelResult run_parallel_learning(const RoundPlan& plan, const Scenario& scenario, const RouteCatalog& catalog,
                                     const SimConfig& config, const ParallelOptions& options,
                                     std::optional<BayesCounters> initial) {
  if (plan.workers < 1 || plan.events_per_subsim < 1 || plan.rounds < 1) throw ConfigError("invalid round plan");
  ParallelResult result;
  result.counters = initial ? std::move(*initial) : BayesCounters::for_topology(scenario.topology);

  SimConfig worker_config = config;
  if (options.histogram_tail > 0) {
    const std::uint64_t per_worker = (options.histogram_tail + plan.workers - 1) / plan.workers;
    worker_config.histogram_tail = std::min(per_worker, plan.events_per_subsim);
  }

  std::uint64_t arrivals = 0, blocked = 0;
  for (std::uint32_t k = 0; k < plan.rounds; ++k) {
    RoundOutcome round = run_round(plan, k, result.counters, scenario, catalog, worker_config, options);
    const bool last = k + 1 == plan.rounds;
    Metrics round_metrics;
    for (WorkerResult& r : round.results) {
      if (!last && options.histogram_tail > 0) std::fill(r.metrics.tail_extra_hops.begin(), r.metrics.tail_extra_hops.end(), 0);
      round_metrics.merge(r.metrics);
    }
    for (const WindowSample& w : round_metrics.windows) {
      arrivals += w.arrivals;
      blocked += w.blocked;
      result.curve.push_back(CurvePoint{arrivals, w});
    }
    round_metrics.windows.clear();
    result.aggregate.merge(round_metrics);
    result.counters = std::move(round.global);
    result.rounds.push_back(RoundSummary{k, result.aggregate.arrivals, result.aggregate.blocked, round.seconds});
    if (options.progress) {
      *options.progress << "round " << (k + 1) << "/" << plan.rounds << " H=" << result.counters.arrivals()
                        << " arrivals=" << result.aggregate.arrivals
                        << " blocking=" << result.aggregate.blocking_probability() << " (" << round.seconds << " s)"
                        << std::endl;
    }
  }
  for (const CurvePoint& p : result.curve) result.aggregate.windows.push_back(p.window);
  return result;
}

}  // namespace nbll
