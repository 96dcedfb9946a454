#include "nbll/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "nbll/errors.hpp"

namespace nbll {

namespace {

using json = nlohmann::json;

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::optional<int> parse_delta(const json& v) {
  if (v.is_string() && v.get<std::string>() == "inf") return std::nullopt;
  if (v.is_number_integer() && v.get<int>() >= 0) return v.get<int>();
  throw ConfigError("deltas entries must be non-negative integers or \"inf\"");
}

std::pair<int, int> parse_range(const json& v) {
  if (!v.is_array() || v.size() != 2) throw ConfigError("capacity_range must be [lo, hi]");
  return {v[0].get<int>(), v[1].get<int>()};
}

unsigned resolve_threads(unsigned requested) {
  return requested ? requested : std::max(1u, std::thread::hardware_concurrency());
}

// Runs jobs[i] for every i on up to `threads` threads.
void run_jobs(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
}

}  // namespace

ExperimentSpec ExperimentSpec::from_json(const std::string& text, const std::string& base_dir) {
  ExperimentSpec spec;
  try {
    const json doc = json::parse(text);
    auto path = std::filesystem::path(doc.at("topology").get<std::string>());
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    spec.topology_path = path.string();
    spec.topology_name = doc.value("name", std::filesystem::path(spec.topology_path).stem().string());
    for (const auto& p : doc.at("policies")) spec.policies.push_back(Policy::parse(p.get<std::string>()));
    spec.x_values = doc.at("x").get<std::vector<double>>();
    spec.load_base = doc.value("load_base", spec.load_base);
    if (doc.contains("capacity_range")) spec.capacity_range = parse_range(doc["capacity_range"]);
    if (doc.contains("seeds")) {
      spec.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
    } else if (doc.contains("replications")) {
      const auto reps = doc["replications"].get<std::uint64_t>();
      const auto base = doc.value("base_seed", std::uint64_t{1});
      spec.seeds.clear();
      for (std::uint64_t r = 0; r < reps; ++r) spec.seeds.push_back(base + r);
    }
    spec.scenario_seed = doc.value("scenario_seed", spec.scenario_seed);
    spec.events = doc.value("events", spec.events);
    if (doc.contains("parallel")) {
      const auto& p = doc["parallel"];
      spec.parallel.workers = p.value("workers", spec.parallel.workers);
      spec.parallel.events_per_subsim = p.value("events_per_subsim", spec.parallel.events_per_subsim);
      spec.parallel.rounds = p.value("rounds", spec.parallel.rounds);
    }
    spec.alpha = doc.value("alpha", spec.alpha);
    spec.window = doc.value("window", spec.window);
    spec.nb_histogram_tail = doc.value("nb_histogram_tail", spec.nb_histogram_tail);
    if (doc.contains("deltas"))
      for (const auto& d : doc["deltas"]) spec.deltas.push_back(parse_delta(d));
    spec.threads = doc.value("threads", spec.threads);
    spec.time_single_worker = doc.value("time_single_worker", spec.time_single_worker);
    if (doc.contains("hop_bound") && !doc["hop_bound"].is_null()) spec.hop_bound = doc["hop_bound"].get<std::uint32_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

void ExperimentSpec::validate() const {
  if (policies.empty()) throw ConfigError("experiment spec: no policies");
  if (x_values.empty()) throw ConfigError("experiment spec: no X values");
  for (double x : x_values)
    if (!(x >= 0.0)) throw ConfigError("experiment spec: X values must be non-negative");
  if (!std::is_sorted(x_values.begin(), x_values.end())) throw ConfigError("experiment spec: X values must be sorted");
  if (seeds.empty()) throw ConfigError("experiment spec: replications must be >= 1");
  if (events < 1) throw ConfigError("experiment spec: events must be >= 1");
  if (parallel.workers < 1 || parallel.events_per_subsim < 1 || parallel.rounds < 1)
    throw ConfigError("experiment spec: invalid parallel plan");
  if (window < 1) throw ConfigError("experiment spec: window must be >= 1");
}

std::uint64_t ResultRow::histogram_total() const {
  std::uint64_t n = 0;
  for (std::uint64_t c : histogram) n += c;
  return n;
}

ResultRow make_row(const std::string& topology, const Policy& policy, double x, std::uint64_t seed,
                   const Metrics& metrics) {
  ResultRow row;
  row.topology = topology;
  row.policy = policy.name();
  row.x = x;
  row.seed = seed;
  row.arrivals = metrics.arrivals;
  row.blocked = metrics.blocked;
  row.avg_extra_hops = average_extra_hops(metrics.extra_hops);
  for (std::size_t d = 0; d < metrics.extra_hops.size(); ++d)
    row.histogram[std::min(d, kHistogramCells - 1)] += metrics.extra_hops[d];
  return row;
}

double student_t95(std::size_t df) {
  static constexpr double kTable[] = {
      0.0,    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
      2.120,  2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df == 0) throw ConfigError("Student-t quantile needs df >= 1");
  if (df <= 30) return kTable[df];
  if (df <= 40) return 2.021;
  if (df <= 60) return 2.000;
  if (df <= 120) return 1.980;
  return 1.960;
}

std::optional<double> ci95_half_width(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n < 2) return std::nullopt;
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return student_t95(n - 1) * sd / std::sqrt(static_cast<double>(n));
}

const char* const kCsvHeader =
    "topology,policy,x,seed,arrivals,blocked,blocking_probability,ci95_half_width,avg_extra_hops,"
    "eh0,eh1,eh2,eh3,eh4,eh5,eh6,eh7,eh8,eh9,eh10plus";

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const ResultRow& row) {
  out << row.topology << ',' << row.policy << ',' << format_real(row.x) << ',' << row.seed << ',';
  if (row.error) {
    // Failed point: identity columns only.
    out << ",,,,";
    for (std::size_t i = 0; i < kHistogramCells; ++i) out << ',';
    out << '\n';
    return;
  }
  out << row.arrivals << ',' << row.blocked << ',' << format_real(row.blocking_probability()) << ',';
  if (row.ci95_half_width) out << format_real(*row.ci95_half_width);
  out << ',' << format_real(row.avg_extra_hops);
  for (std::uint64_t c : row.histogram) out << ',' << c;
  out << '\n';
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  write_csv_header(out);
  for (const ResultRow& r : rows) write_csv_row(out, r);
}

Scenario spec_scenario(const ExperimentSpec& spec, const Topology& base, double x) {
  SimConfig c;
  c.scenario_seed = spec.scenario_seed;
  c.capacity_range = spec.capacity_range;
  c.load_base = spec.load_base;
  c.load_interval = x;
  return sample_scenario(c, base);
}

SimConfig spec_config(const ExperimentSpec& spec, const Policy& policy, double x, std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  c.scenario_seed = spec.scenario_seed;
  c.num_events = spec.events;
  c.policy = policy;
  c.capacity_range = spec.capacity_range;
  c.load_base = spec.load_base;
  c.load_interval = x;
  c.alpha = spec.alpha;
  c.window = spec.window;
  return c;
}

namespace {

struct Prepared {
  Topology base;
  RouteCatalog catalog;
};

Prepared prepare(const ExperimentSpec& spec) {
  spec.validate();
  Topology base = Topology::from_file(spec.topology_path);
  RouteCatalog catalog =
      enumerate_routes(base, spec.hop_bound ? std::optional<int>(static_cast<int>(*spec.hop_bound)) : std::nullopt);
  return {std::move(base), std::move(catalog)};
}

ParallelOptions parallel_options(const ExperimentSpec& spec, const RunEnvironment& env) {
  ParallelOptions opt = env.parallel;
  if (!opt.threads) opt.threads = resolve_threads(spec.threads);
  opt.histogram_tail = spec.nb_histogram_tail;
  return opt;
}

std::vector<ResultRow> run_point(const ExperimentSpec& spec, const Prepared& prep, const Scenario& scenario,
                                 const Policy& policy, double x, const RunEnvironment& env) {
  std::vector<ResultRow> rows;
  if (policy.kind == PolicyKind::NaiveBayesLeastLoaded) {
    const std::uint64_t seed = spec.seeds.front();
    try {
      RoundPlan plan{spec.parallel.workers, spec.parallel.events_per_subsim, spec.parallel.rounds, seed};
      ParallelResult res =
          run_parallel_learning(plan, scenario, prep.catalog, spec_config(spec, policy, x, seed), parallel_options(spec, env));
      rows.push_back(make_row(spec.topology_name, policy, x, seed, res.aggregate));
    } catch (const std::exception& e) {
      ResultRow failed;
      failed.topology = spec.topology_name;
      failed.policy = policy.name();
      failed.x = x;
      failed.seed = seed;
      failed.error = e.what();
      rows.push_back(failed);
    }
    return rows;
  }

  rows.resize(spec.seeds.size());
  run_jobs(spec.seeds.size(), resolve_threads(spec.threads), [&](std::size_t i) {
    const std::uint64_t seed = spec.seeds[i];
    try {
      SimResult res = run_simulation(spec_config(spec, policy, x, seed), scenario, prep.catalog);
      rows[i] = make_row(spec.topology_name, policy, x, seed, res.metrics);
    } catch (const std::exception& e) {
      rows[i].topology = spec.topology_name;
      rows[i].policy = policy.name();
      rows[i].x = x;
      rows[i].seed = seed;
      rows[i].error = e.what();
    }
  });
  std::vector<double> bps;
  for (const ResultRow& r : rows)
    if (!r.error) bps.push_back(r.blocking_probability());
  const auto ci = ci95_half_width(bps);
  for (ResultRow& r : rows)
    if (!r.error) r.ci95_half_width = ci;
  return rows;
}

std::vector<ResultRow> run_policies(const ExperimentSpec& spec, const std::vector<Policy>& policies,
                                    const RunEnvironment& env) {
  const Prepared prep = prepare(spec);
  std::vector<Scenario> scenarios;
  for (double x : spec.x_values) scenarios.push_back(spec_scenario(spec, prep.base, x));

  std::vector<ResultRow> all;
  for (const Policy& policy : policies) {
    for (std::size_t xi = 0; xi < spec.x_values.size(); ++xi) {
      auto rows = run_point(spec, prep, scenarios[xi], policy, spec.x_values[xi], env);
      if (env.sink) env.sink(rows);
      all.insert(all.end(), rows.begin(), rows.end());
    }
  }
  return all;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const RunEnvironment& env) {
  return run_policies(spec, spec.policies, env);
}

std::vector<ResultRow> run_hoplimit_study(const ExperimentSpec& spec, const RunEnvironment& env) {
  if (spec.deltas.empty()) throw ConfigError("hop-limit study needs a deltas list");
  if (std::none_of(spec.deltas.begin(), spec.deltas.end(), [](const auto& d) { return !d.has_value(); }))
    throw ConfigError("hop-limit deltas must include \"inf\"");
  std::vector<Policy> policies;
  for (const auto& d : spec.deltas) policies.push_back(Policy::ll_hoplimit(d));
  policies.push_back(Policy::ll());
  return run_policies(spec, policies, env);
}

LearningCurve run_learning_curve(const ExperimentSpec& spec, const RunEnvironment& env) {
  const Prepared prep = prepare(spec);
  const double x = spec.x_values.front();
  const Scenario scenario = spec_scenario(spec, prep.base, x);
  const std::uint64_t seed = spec.seeds.front();
  const RoundPlan plan{spec.parallel.workers, spec.parallel.events_per_subsim, spec.parallel.rounds, seed};
  const SimConfig config = spec_config(spec, Policy::nb_ll(), x, seed);

  LearningCurve curve;
  curve.x = x;
  ParallelResult res = run_parallel_learning(plan, scenario, prep.catalog, config, parallel_options(spec, env));
  curve.points = res.curve;
  curve.rounds = res.rounds;
  curve.aggregate = res.aggregate;
  if (spec.time_single_worker) {
    ParallelOptions single = parallel_options(spec, env);
    single.threads = 1;
    single.progress = nullptr;
    ParallelResult again = run_parallel_learning(plan, scenario, prep.catalog, config, single);
    if (again.aggregate != res.aggregate || again.counters != res.counters)
      throw ConsistencyError("single-thread rerun diverged from the parallel run");
    for (const RoundSummary& r : again.rounds) curve.single_worker_seconds.push_back(r.seconds);
  }
  return curve;
}

void write_curve_csv(std::ostream& out, const LearningCurve& curve) {
  out << "x,cumulative_arrivals,window_arrivals,window_blocked,blocking_probability\n";
  for (const CurvePoint& p : curve.points)
    out << format_real(curve.x) << ',' << p.cumulative_arrivals << ',' << p.window.arrivals << ','
        << p.window.blocked << ',' << format_real(p.window.blocking_probability()) << '\n';
}

void write_round_csv(std::ostream& out, const LearningCurve& curve) {
  out << "round,cumulative_arrivals,cumulative_blocking_probability,seconds,single_worker_seconds\n";
  for (std::size_t i = 0; i < curve.rounds.size(); ++i) {
    const RoundSummary& r = curve.rounds[i];
    out << r.round << ',' << r.cumulative_arrivals << ',' << format_real(r.blocking_probability()) << ','
        << format_real(r.seconds) << ',';
    if (i < curve.single_worker_seconds.size()) out << format_real(curve.single_worker_seconds[i]);
    out << '\n';
  }
}

SimConfig sim_config_from_json(const std::string& text, SimConfig base) {
  try {
    const json doc = json::parse(text);
    base.seed = doc.value("seed", base.seed);
    if (doc.contains("scenario_seed")) base.scenario_seed = doc["scenario_seed"].get<std::uint64_t>();
    base.num_events = doc.value("num_events", base.num_events);
    if (doc.contains("policy")) base.policy = Policy::parse(doc["policy"].get<std::string>());
    if (doc.contains("capacity_range")) base.capacity_range = parse_range(doc["capacity_range"]);
    base.load_base = doc.value("load_base", base.load_base);
    base.load_interval = doc.value("load_interval", base.load_interval);
    base.alpha = doc.value("alpha", base.alpha);
    base.snapshot_log = doc.value("snapshot_log", base.snapshot_log);
    base.window = doc.value("window", base.window);
    base.histogram_tail = doc.value("histogram_tail", base.histogram_tail);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  base.validate();
  return base;
}

void write_plot_script(std::ostream& out) {
  out << R"PY(#!/usr/bin/env python3
"""Redraws result CSVs written by `nbll`.

usage: plot_results.py results.csv [hoplimit.csv] [curve.csv]
Figures are written next to each CSV as PNG files.
"""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def blocking_vs_x(path):
    rows = [r for r in read(path) if r["arrivals"]]
    series = defaultdict(lambda: defaultdict(list))
    ci = {}
    for r in rows:
        series[r["policy"]][float(r["x"])].append(float(r["blocking_probability"]))
        if r["ci95_half_width"]:
            ci[(r["policy"], float(r["x"]))] = float(r["ci95_half_width"])
    fig, ax = plt.subplots()
    for policy, points in series.items():
        xs = sorted(points)
        ys = [sum(points[x]) / len(points[x]) for x in xs]
        err = [ci.get((policy, x), 0.0) for x in xs]
        ax.errorbar(xs, ys, yerr=err, marker="o", capsize=3, label=policy)
    ax.set_xlabel("load interval X (erlang)")
    ax.set_ylabel("blocking probability")
    ax.set_yscale("log")
    ax.legend()
    fig.savefig(path.rsplit(".", 1)[0] + "_blocking.png", dpi=150)

    fig, ax = plt.subplots()
    cells = ["eh%d" % i for i in range(10)] + ["eh10plus"]
    policies = sorted(series)
    width = 0.8 / max(1, len(policies))
    for i, policy in enumerate(policies):
        sel = [r for r in rows if r["policy"] == policy]
        totals = [sum(int(r[c]) for r in sel) for c in cells]
        n = sum(totals) or 1
        ax.bar([k + i * width for k in range(len(cells))], [t / n for t in totals], width, label=policy)
    ax.set_xticks(range(len(cells)))
    ax.set_xticklabels([c[2:] for c in cells])
    ax.set_xlabel("extra hops")
    ax.set_ylabel("fraction of established connections")
    ax.legend()
    fig.savefig(path.rsplit(".", 1)[0] + "_extra_hops.png", dpi=150)


def hoplimit(path):
    rows = [r for r in read(path) if r["arrivals"] and r["policy"].startswith("ll-hoplimit:")]
    by_x = defaultdict(lambda: defaultdict(list))
    for r in rows:
        limit = r["policy"].split(":", 1)[1]
        by_x[float(r["x"])][limit].append(float(r["blocking_probability"]))
    fig, ax = plt.subplots()
    for x, limits in sorted(by_x.items()):
        keys = sorted(limits, key=lambda k: float("inf") if k == "inf" else int(k))
        ys = [sum(limits[k]) / len(limits[k]) for k in keys]
        ax.plot(range(len(keys)), ys, marker="o", label="X=%g" % x)
        ax.set_xticks(range(len(keys)))
        ax.set_xticklabels(keys)
    ax.set_xlabel("extra hop limit")
    ax.set_ylabel("blocking probability")
    ax.legend()
    fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)


def curve(path):
    rows = read(path)
    xs = [int(r["cumulative_arrivals"]) for r in rows]
    ys = [float(r["blocking_probability"]) for r in rows]
    fig, ax = plt.subplots()
    ax.plot(xs, ys, marker=".")
    ax.set_xscale("log")
    ax.set_xlabel("arrivals learned")
    ax.set_ylabel("window blocking probability")
    fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)


def main(argv):
    for path in argv[1:]:
        header = open(path).readline()
        if header.startswith("x,cumulative_arrivals"):
            curve(path)
        elif "ll-hoplimit:" in open(path).read():
            hoplimit(path)
        else:
            blocking_vs_x(path)


if __name__ == "__main__":
    main(sys.argv)
)PY";
}

}  // namespace nbll
