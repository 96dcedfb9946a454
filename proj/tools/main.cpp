// nbll: circuit-switched routing simulator and experiment driver.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nbll/errors.hpp"
#include "nbll/harness.hpp"
#include "process_runner.hpp"

namespace fs = std::filesystem;
using namespace nbll;

namespace {

constexpr int kPartialFailure = 2;
constexpr int kError = 1;

std::optional<int> parse_limit(const std::string& text) {
  if (text == "inf") return std::nullopt;
  std::size_t used = 0;
  int v = -1;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
  }
  if (used != text.size() || v < 0) throw ConfigError("extra-hop limit must be a non-negative integer or inf");
  return v;
}

std::ofstream open_out(const std::string& path) {
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

struct SimulateArgs {
  std::string topology, policy = "sp", out, config, checkpoint, resume, snapshot_log, delta;
  double x = 0.0;
  std::uint64_t events = 0, seed = 1, window = 0, histogram_tail = 0;
  std::optional<std::uint64_t> scenario_seed;
  std::vector<int> capacity_range;
  std::uint32_t workers = 0, rounds = 0;
  std::uint64_t events_per_subsim = 0;
  std::optional<int> hop_bound;
  unsigned threads = 0;
  bool processes = false, audit = false;
};

int simulate(const SimulateArgs& a) {
  SimConfig config;
  if (!a.config.empty()) config = sim_config_from_json(cli::read_file(a.config));
  config.seed = a.seed;
  if (a.scenario_seed) config.scenario_seed = a.scenario_seed;
  // A bare "ll-hoplimit" takes its limit from --delta.
  config.policy = a.policy == "ll-hoplimit" && !a.delta.empty() ? Policy::ll() : Policy::parse(a.policy);
  if (!a.delta.empty()) {
    if (config.policy.kind != PolicyKind::LeastLoaded && config.policy.kind != PolicyKind::LeastLoadedHopLimit)
      throw ConfigError("--delta applies to ll-hoplimit only");
    config.policy = Policy::ll_hoplimit(parse_limit(a.delta));
  }
  config.load_interval = a.x;
  if (a.events) config.num_events = a.events;
  if (a.window) config.window = a.window;
  if (a.histogram_tail) config.histogram_tail = a.histogram_tail;
  if (!a.capacity_range.empty()) config.capacity_range = std::pair{a.capacity_range[0], a.capacity_range[1]};
  config.audit = config.audit || a.audit;
  config.snapshot_log = !a.snapshot_log.empty();
  config.validate();

  const Topology base = Topology::from_file(a.topology);
  const RouteCatalog catalog = enumerate_routes(base, a.hop_bound);
  const Scenario scenario = sample_scenario(config, base);
  const std::string name = fs::path(a.topology).stem().string();

  Metrics metrics;
  std::optional<BayesCounters> counters;
  std::optional<BayesCounters> initial;
  if (!a.resume.empty()) initial = BayesCounters::load(a.resume);

  const bool nb = config.policy.kind == PolicyKind::NaiveBayesLeastLoaded;
  const bool planned = a.workers || a.rounds || a.events_per_subsim;
  if (nb && (planned || a.processes)) {
    if (config.snapshot_log) throw ConfigError("--snapshot-log needs a single sequential run");
    const std::uint32_t workers = a.workers ? a.workers : 1;
    RoundPlan plan;
    if (a.events_per_subsim && a.rounds) {
      plan = RoundPlan{workers, a.events_per_subsim, a.rounds, config.seed};
      if (a.events && plan.total_events() != a.events)
        plan_rounds(a.events, workers, a.events_per_subsim, config.seed);
    } else {
      const std::uint64_t per = a.events_per_subsim ? a.events_per_subsim : config.num_events / workers;
      plan = plan_rounds(config.num_events, workers, per ? per : 1, config.seed);
    }
    ParallelOptions opt;
    opt.threads = a.threads;
    opt.progress = &std::cerr;
    opt.histogram_tail = config.histogram_tail;
    if (a.processes) opt.runner = cli::process_runner(a.hop_bound);
    ParallelResult res = run_parallel_learning(plan, scenario, catalog, config, opt, initial);
    metrics = std::move(res.aggregate);
    counters = std::move(res.counters);
  } else {
    if (nb && !initial) initial = BayesCounters::for_topology(scenario.topology);
    SimResult res = run_simulation(config, scenario, catalog, nb ? initial : std::nullopt);
    if (config.snapshot_log) {
      std::ofstream log = open_out(a.snapshot_log);
      write_snapshot_csv(log, res.snapshots, scenario.topology.link_count());
    }
    metrics = std::move(res.metrics);
    counters = std::move(res.learner);
  }

  if (!a.checkpoint.empty()) {
    if (!counters) throw ConfigError("--checkpoint needs the nb-ll policy");
    counters->save(a.checkpoint);
  }
  std::ofstream out = open_out(a.out);
  write_csv(out, {make_row(name, config.policy, a.x, config.seed, metrics)});
  return 0;
}

struct SpecArgs {
  std::string spec, out, plot, timing;
  unsigned threads = 0;
  bool processes = false;
};

ExperimentSpec load_spec(const std::string& path) {
  return ExperimentSpec::from_json(cli::read_file(path), fs::path(path).parent_path().string());
}

RunEnvironment environment(const ExperimentSpec& spec, const SpecArgs& a) {
  RunEnvironment env;
  env.parallel.progress = &std::cerr;
  env.parallel.threads = a.threads;
  if (a.processes)
    env.parallel.runner =
        cli::process_runner(spec.hop_bound ? std::optional<int>(static_cast<int>(*spec.hop_bound)) : std::nullopt);
  return env;
}

void emit_plot(const std::string& path) {
  if (path.empty()) return;
  std::ofstream plot = open_out(path);
  write_plot_script(plot);
}

int sweep(const SpecArgs& a, bool hoplimit) {
  ExperimentSpec spec = load_spec(a.spec);
  if (a.threads) spec.threads = a.threads;
  std::ofstream out = open_out(a.out);
  write_csv_header(out);
  out.flush();
  bool failed = false;
  RunEnvironment env = environment(spec, a);
  env.sink = [&](const std::vector<ResultRow>& rows) {
    for (const ResultRow& r : rows) {
      write_csv_row(out, r);
      if (r.error) {
        failed = true;
        std::cerr << "failed: " << r.policy << " x=" << r.x << " seed=" << r.seed << ": " << *r.error << '\n';
      }
    }
    out.flush();
  };
  if (hoplimit)
    run_hoplimit_study(spec, env);
  else
    run_experiment(spec, env);
  emit_plot(a.plot);
  return failed ? kPartialFailure : 0;
}

int curve(const SpecArgs& a) {
  ExperimentSpec spec = load_spec(a.spec);
  if (a.threads) spec.threads = a.threads;
  const LearningCurve lc = run_learning_curve(spec, environment(spec, a));
  std::ofstream out = open_out(a.out);
  write_curve_csv(out, lc);
  if (!a.timing.empty()) {
    std::ofstream timing = open_out(a.timing);
    write_round_csv(timing, lc);
  }
  emit_plot(a.plot);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circuit-switched network routing simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run one simulation and write a one-row CSV");
  simulate_cmd->add_option("--topology", sim.topology, "Topology JSON file")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--policy", sim.policy, "sp | ll | ll-hoplimit:<n|inf> | nb-ll");
  simulate_cmd->add_option("--x", sim.x, "Load interval X (pair loads uniform in [base, base+X])");
  simulate_cmd->add_option("--events", sim.events, "Total connection arrivals");
  simulate_cmd->add_option("--seed", sim.seed, "Traffic seed");
  simulate_cmd->add_option("--scenario-seed", sim.scenario_seed, "Capacity/load seed (default: --seed)");
  simulate_cmd->add_option("--capacity-range", sim.capacity_range, "Uniform capacity range LO HI")->expected(2);
  simulate_cmd->add_option("--workers", sim.workers, "nb-ll: sub-simulations per round");
  simulate_cmd->add_option("--events-per-subsim", sim.events_per_subsim, "nb-ll: arrivals per sub-simulation");
  simulate_cmd->add_option("--rounds", sim.rounds, "nb-ll: learning rounds");
  simulate_cmd->add_option("--delta", sim.delta, "Extra-hop limit for ll-hoplimit (integer or inf)");
  simulate_cmd->add_option("--window", sim.window, "Arrivals per blocking sample");
  simulate_cmd->add_option("--histogram-tail", sim.histogram_tail, "nb-ll: tail histogram length");
  simulate_cmd->add_option("--hop-bound", sim.hop_bound, "Drop catalog routes longer than this");
  simulate_cmd->add_option("--config", sim.config, "Run config JSON; flags override it")->check(CLI::ExistingFile);
  simulate_cmd->add_option("--checkpoint", sim.checkpoint, "Write final nb-ll counters here");
  simulate_cmd->add_option("--resume", sim.resume, "Start nb-ll from these counters")->check(CLI::ExistingFile);
  simulate_cmd->add_option("--snapshot-log", sim.snapshot_log, "Write per-arrival occupancy snapshots (CSV)");
  simulate_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  simulate_cmd->add_flag("--processes", sim.processes, "Run nb-ll workers as separate processes");
  simulate_cmd->add_flag("--audit", sim.audit, "Check link conservation after every event");
  simulate_cmd->add_option("--out", sim.out, "Output CSV")->required();

  SpecArgs spec_args;
  auto add_spec_options = [&](CLI::App* cmd) {
    cmd->add_option("--spec", spec_args.spec, "Experiment spec JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", spec_args.out, "Output CSV")->required();
    cmd->add_option("--plot", spec_args.plot, "Also write a matplotlib script here");
    cmd->add_option("--threads", spec_args.threads, "Concurrent simulations (0 = all cores)");
    cmd->add_flag("--processes", spec_args.processes, "Run nb-ll workers as separate processes");
  };
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep policies and load intervals");
  add_spec_options(sweep_cmd);
  auto* hoplimit_cmd = app.add_subcommand("hoplimit", "Blocking versus extra-hop limit");
  add_spec_options(hoplimit_cmd);
  auto* curve_cmd = app.add_subcommand("curve", "nb-ll learning curve");
  add_spec_options(curve_cmd);
  curve_cmd->add_option("--timing", spec_args.timing, "Per-round wall-clock CSV");

  std::string task, counters, result;
  auto* worker_cmd = app.add_subcommand("worker", "Run one sub-simulation (used by --processes)");
  worker_cmd->add_option("--task", task)->required();
  worker_cmd->add_option("--counters", counters)->required();
  worker_cmd->add_option("--out", result)->required();
  worker_cmd->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate_cmd) return simulate(sim);
    if (*sweep_cmd) return sweep(spec_args, false);
    if (*hoplimit_cmd) return sweep(spec_args, true);
    if (*curve_cmd) return curve(spec_args);
    if (*worker_cmd) return cli::run_worker_files(task, counters, result);
  } catch (const std::exception& e) {
    std::cerr << "nbll: " << e.what() << '\n';
    return kError;
  }
  return 0;
}
