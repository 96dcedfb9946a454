#pragma once

// Experiment harness: policy/load sweeps, hop-limit and learning-curve
// studies, Student-t confidence intervals and CSV output.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nbll/engine.hpp"
#include "nbll/parallel.hpp"
#include "nbll/routing.hpp"

namespace nbll {

struct ParallelSettings {
  std::uint32_t workers = 8;
  std::uint64_t events_per_subsim = 250'000;
  std::uint32_t rounds = 5;

  std::uint64_t total_events() const { return std::uint64_t{workers} * events_per_subsim * rounds; }
};

struct ExperimentSpec {
  std::string topology_path;
  /// Label written to the CSV `topology` column; defaults to the file stem.
  std::string topology_name;
  std::vector<Policy> policies;
  std::vector<double> x_values;
  double load_base = 0.45;
  std::optional<std::pair<int, int>> capacity_range;
  /// One replication per seed (sp, ll and hop-limited ll).
  std::vector<std::uint64_t> seeds{1};
  /// Capacities and pair loads are drawn once per X from this seed, so every
  /// policy and replication sees the same network.
  std::uint64_t scenario_seed = 1;
  std::uint64_t events = 1'000'000;
  /// nb-ll runs one parallel learning run per X, seeded by seeds.front().
  ParallelSettings parallel;
  double alpha = 1e-6;
  std::uint64_t window = 100'000;
  /// nb-ll extra-hop statistics cover the last this-many arrivals (0 = all).
  std::uint64_t nb_histogram_tail = 1'000'000;
  /// Hop-limit study limits; unset means unlimited.
  std::vector<std::optional<int>> deltas;
  /// Concurrent simulations (0 = hardware cores).
  unsigned threads = 0;
  /// Learning curve: also time the same plan on one thread.
  bool time_single_worker = false;
  std::optional<std::uint32_t> hop_bound;

  /// Parses the sweep spec JSON; relative topology paths resolve against `base_dir`.
  static ExperimentSpec from_json(const std::string& text, const std::string& base_dir = ".");
  void validate() const;
};

inline constexpr std::size_t kHistogramCells = 11;  // eh0..eh9, eh10plus

struct ResultRow {
  std::string topology;
  std::string policy;
  double x = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t blocked = 0;
  std::optional<double> ci95_half_width;
  double avg_extra_hops = 0.0;
  std::array<std::uint64_t, kHistogramCells> histogram{};
  std::optional<std::string> error;

  double blocking_probability() const { return arrivals ? static_cast<double>(blocked) / arrivals : 0.0; }
  std::uint64_t histogram_total() const;
};

/// Builds a row from run metrics; the histogram folds counts >= 10 into the last cell.
ResultRow make_row(const std::string& topology, const Policy& policy, double x, std::uint64_t seed,
                   const Metrics& metrics);

/// Two-sided 95% Student-t quantile for `df` degrees of freedom.
double student_t95(std::size_t df);
/// Half-width of the 95% CI of the mean of `samples`; unset for fewer than two.
std::optional<double> ci95_half_width(const std::vector<double>& samples);

extern const char* const kCsvHeader;
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ResultRow& row);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Writes a matplotlib script that redraws the result, hop-limit and curve CSVs.
void write_plot_script(std::ostream& out);

/// Called once per finished (policy, X) point with that point's rows.
using RowSink = std::function<void(const std::vector<ResultRow>&)>;

struct RunEnvironment {
  ParallelOptions parallel;  // runner / progress for nb-ll points
  RowSink sink;
};

/// Every (policy, X, replication); rows ordered by policy, X, seed.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const RunEnvironment& env = {});

/// Blocking vs extra-hop limit: one ll-hoplimit:<d> row set per spec.deltas
/// entry plus plain ll, for every X and seed.
std::vector<ResultRow> run_hoplimit_study(const ExperimentSpec& spec, const RunEnvironment& env = {});

struct LearningCurve {
  double x = 0.0;
  std::vector<CurvePoint> points;
  std::vector<RoundSummary> rounds;
  /// Per-round wall clock with one thread, when requested.
  std::vector<double> single_worker_seconds;
  Metrics aggregate;
};

/// nb-ll parallel learning run at spec.x_values.front().
LearningCurve run_learning_curve(const ExperimentSpec& spec, const RunEnvironment& env = {});

void write_curve_csv(std::ostream& out, const LearningCurve& curve);
void write_round_csv(std::ostream& out, const LearningCurve& curve);

/// Scenario for one X of a spec (capacities and loads from spec.scenario_seed).
Scenario spec_scenario(const ExperimentSpec& spec, const Topology& base, double x);
SimConfig spec_config(const ExperimentSpec& spec, const Policy& policy, double x, std::uint64_t seed);

/// Reads a run config JSON (keys mirror SimConfig) on top of `base`.
SimConfig sim_config_from_json(const std::string& text, SimConfig base = {});

}  // namespace nbll
