// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

#include "nbll/harness.hpp"
#include "oracles.hpp"

using namespace nbll;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string data(const std::string& file) { return std::string(NBLL_DATA_DIR) + "/" + file; }

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

// 1 -------------------------------------------------------------------------

Outcome erlang_b_oracle() {
  Outcome out;
  std::string summary;
  for (auto [w, a] : {std::pair{1, 1.0}, std::pair{2, 1.0}, std::pair{5, 4.0}}) {
    const Topology link({"A", "B"}, {Link{0, 0, 1, w}});
    const Scenario s{link, TrafficMatrix{{a}}};
    const RouteCatalog catalog = enumerate_routes(link);
    const double expected = oracle::erlang_b(w, a);
    std::optional<std::uint64_t> blocked;
    for (Policy p : {Policy::sp(), Policy::ll(), Policy::ll_hoplimit(0), Policy::nb_ll()}) {
      SimConfig c;
      c.policy = p;
      c.num_events = 1'000'000;
      c.seed = 1;
      const auto start = std::chrono::steady_clock::now();
      const SimResult r = run_simulation(c, s, catalog,
                                         p == Policy::nb_ll() ? std::optional(BayesCounters::for_topology(link))
                                                              : std::nullopt);
      const double took = seconds_since(start);
      const double bp = r.metrics.blocking_probability();
      out.require(std::abs(bp - expected) <= 0.01, p.name() + " W=" + std::to_string(w) + " off by " +
                                                       fmt("%.4f", std::abs(bp - expected)));
      out.require(took < 30.0, "W=" + std::to_string(w) + " took " + fmt("%.1f s", took));
      // A single route leaves nothing to choose: every policy sees the same outcomes.
      if (blocked) out.require(*blocked == r.metrics.blocked, p.name() + " differs from sp");
      blocked = r.metrics.blocked;
      if (p == Policy::sp())
        summary += " E(" + std::to_string(w) + "," + fmt("%g", a) + ")=" + fmt("%.4f", expected) + " sim=" +
                   fmt("%.4f", bp);
    }
  }
  if (out.pass) out.detail = summary.substr(1);
  return out;
}

// 2 -------------------------------------------------------------------------

Outcome normalization() {
  Outcome out;
  std::mt19937_64 gen(2024);
  double worst = 0.0;
  auto track = [&](double sum) { worst = std::max(worst, std::abs(sum - 1.0)); };
  for (const char* file : {"triangle.json", "nsfnet.json"}) {
    const Topology topo = Topology::from_file(data(file));
    for (int state = 0; state < 1000; ++state) {
      std::vector<int> cap = topo.capacities();
      if (topo.link_count() > 3)
        for (int& w : cap) w = std::uniform_int_distribution<int>(5, 27)(gen);
      BayesCounters c(cap, topo.pair_count());
      const int n = std::uniform_int_distribution<int>(0, 400)(gen);
      const double p_block = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
      std::vector<int> snap(cap.size());
      for (int i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < cap.size(); ++j) snap[j] = std::uniform_int_distribution<int>(0, cap[j])(gen);
        const auto pair = std::uniform_int_distribution<PairId>(0, static_cast<PairId>(topo.pair_count() - 1))(gen);
        c.observe(std::span<const int>(snap), pair, std::bernoulli_distribution(p_block)(gen));
      }
      for (LinkId j = 0; j < c.link_count(); ++j) {
        std::vector<double> given, plain;
        std::uint64_t num_given = 0, num_plain = 0;
        for (int u = 0; u <= c.capacity(j); ++u) {
          given.push_back(p_occ_given_block(c, j, u));
          plain.push_back(p_occ(c, j, u));
          num_given += c.occ_blocked(j, u) + 1;
          num_plain += c.occ_total(j, u) + 1;
        }
        track(compensated_sum(given));
        track(compensated_sum(plain));
        out.require(num_given == c.blocked() + c.capacity(j) + 1, "occupancy|blocked numerators");
        out.require(num_plain == c.arrivals() + c.capacity(j) + 1, "occupancy numerators");
      }
      std::vector<double> pb, pt, tw;
      std::uint64_t num_pb = 0, num_pt = 0;
      for (PairId p = 0; p < c.pair_count(); ++p) {
        pb.push_back(p_pair_given_block(c, p));
        pt.push_back(p_pair(c, p));
        tw.push_back(traffic_weight(c, p));
        num_pb += c.pair_blocked(p) + 1;
        num_pt += c.pair_total(p) + 1;
      }
      track(compensated_sum(pb));
      track(compensated_sum(pt));
      track(compensated_sum(tw));
      out.require(num_pb == c.blocked() + c.pair_count(), "pair|blocked numerators");
      out.require(num_pt == c.arrivals() + c.pair_count(), "pair numerators");
    }
  }
  out.require(worst <= 1e-12, "max |sum - 1| = " + fmt("%.3g", worst));
  if (out.pass) out.detail = "2000 states, max |sum - 1| = " + fmt("%.3g", worst) + ", integer numerators exact";
  return out;
}

// 3 -------------------------------------------------------------------------

Outcome prediction_oracle() {
  Outcome out;
  const Topology tri = Topology::from_file(data("triangle.json"));
  const RouteCatalog catalog = enumerate_routes(tri);
  double worst_pair = 0.0, worst_net = 0.0, worst_factored = 0.0;
  std::uint64_t blocked_total = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SimConfig c;
    c.policy = Policy::nb_ll();
    c.num_events = 20;
    c.seed = seed;
    c.load_base = 2.0;
    c.load_interval = 2.0;
    c.scenario_seed = seed;
    c.snapshot_log = true;
    const Scenario s = sample_scenario(c, tri);
    const SimResult r = run_simulation(c, s, catalog, BayesCounters::for_topology(tri));
    std::vector<oracle::LoggedArrival> log;
    for (const SnapshotRecord& rec : r.snapshots) log.push_back({rec.used, rec.pair, rec.blocked});
    const oracle::Recount rc = oracle::Recount::of(log, tri.capacities(), tri.pair_count());
    const BayesCounters& learned = *r.learner;
    out.require(learned.arrivals() == rc.H && learned.blocked() == rc.B, "recount mismatch, seed " + std::to_string(seed));
    blocked_total += rc.B;

    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 2; ++b)
        for (int d = 0; d <= 2; ++d) {
          const std::vector<int> snap{a, b, d};
          double naive = 0.0;
          for (PairId p = 0; p < 3; ++p) {
            const double got = predict_pair_bp(learned, snap, p).value;
            worst_pair = std::max(worst_pair, std::abs(got - rc.pair_bp(snap, p)) / rc.pair_bp(snap, p));
            naive += traffic_weight(learned, p) * got;
          }
          const double net = predict_network_bp(learned, snap);
          worst_net = std::max(worst_net, std::abs(net - rc.network_bp(snap)) / rc.network_bp(snap));
          worst_factored = std::max(worst_factored, std::abs(net - naive) / naive);
        }
  }
  out.require(blocked_total > 0, "logs contain no blocked arrivals");
  out.require(worst_pair <= 1e-9, "pair prediction rel err " + fmt("%.3g", worst_pair));
  out.require(worst_net <= 1e-9, "network prediction rel err " + fmt("%.3g", worst_net));
  out.require(worst_factored <= 1e-9, "factored vs double loop rel err " + fmt("%.3g", worst_factored));
  if (out.pass)
    out.detail = "100 logs x 27 states: pair " + fmt("%.2g", worst_pair) + ", network " + fmt("%.2g", worst_net) +
                 ", factored " + fmt("%.2g", worst_factored) + " max rel err";
  return out;
}

// 4 -------------------------------------------------------------------------

Outcome merge_and_parallel() {
  Outcome out;
  const Topology ns = Topology::from_file(data("nsfnet.json"));
  const RouteCatalog catalog = enumerate_routes(ns);
  SimConfig c;
  c.policy = Policy::nb_ll();
  c.capacity_range = std::pair{5, 27};
  c.load_interval = 0.6;
  c.num_events = 8'000;
  c.snapshot_log = true;
  c.window = 1'000;
  const Scenario s = sample_scenario(c, ns);

  // (a) four-way partition of one logged run.
  const SimResult logged = run_simulation(c, s, catalog, BayesCounters::for_topology(s.topology));
  std::vector<BayesCounters> parts(4, BayesCounters::for_topology(s.topology));
  for (std::size_t i = 0; i < logged.snapshots.size(); ++i) {
    const SnapshotRecord& rec = logged.snapshots[i];
    parts[i * 4 / logged.snapshots.size()].observe(std::span<const int>(rec.used), rec.pair, rec.blocked);
  }
  std::vector<int> order{0, 1, 2, 3};
  int permutations = 0;
  do {
    BayesCounters g = BayesCounters::for_topology(s.topology);
    for (int i : order) g.merge(parts[i]);
    out.require(g == *logged.learner, "permutation merge differs");
    ++permutations;
  } while (std::next_permutation(order.begin(), order.end()));

  // (b) one worker equals the sequential run.
  SimConfig seq = c;
  seq.snapshot_log = false;
  const RoundPlan one{1, 8'000, 1, 99};
  const ParallelResult par = run_parallel_learning(one, s, catalog, seq);
  seq.seed = worker_seed(99, 0, 0);
  const SimResult direct = run_simulation(seq, s, catalog, BayesCounters::for_topology(s.topology));
  out.require(par.counters == *direct.learner, "1-worker counters differ from sequential");
  out.require(par.aggregate == direct.metrics, "1-worker metrics differ from sequential");

  // (c) repeated runs.
  const RoundPlan plan{2, 1'000, 2, 7};
  const ParallelResult r1 = run_parallel_learning(plan, s, catalog, seq);
  const ParallelResult r2 = run_parallel_learning(plan, s, catalog, seq);
  out.require(r1.counters == r2.counters && r1.aggregate == r2.aggregate, "parallel rerun differs");
  out.require(r1.counters.to_json() == r2.counters.to_json(), "checkpoint bytes differ");
  for (Policy p : {Policy::sp(), Policy::ll(), Policy::ll_hoplimit(2)}) {
    SimConfig pc = seq;
    pc.policy = p;
    out.require(run_simulation(pc, s, catalog).metrics == run_simulation(pc, s, catalog).metrics,
                p.name() + " rerun differs");
  }
  if (out.pass)
    out.detail = std::to_string(permutations) + " merge orders equal sequential; 1-worker run equal field for field; "
                 "reruns bit identical";
  return out;
}

// 5-8 shared desk-scale runs --------------------------------------------------

struct PointStats {
  double mean = 0.0;
  double ci = 0.0;
  double hops = 0.0;
};

PointStats stats(const std::vector<ResultRow>& rows, const std::string& policy) {
  PointStats s;
  std::vector<double> bp;
  double hops = 0.0;
  for (const ResultRow& r : rows) {
    if (r.policy != policy || r.error) continue;
    bp.push_back(r.blocking_probability());
    hops += r.avg_extra_hops;
  }
  if (bp.empty()) return s;
  s.mean = std::accumulate(bp.begin(), bp.end(), 0.0) / bp.size();
  s.ci = ci95_half_width(bp).value_or(0.0);
  s.hops = hops / bp.size();
  return s;
}

struct DeskRuns {
  ExperimentSpec spec;
  std::vector<ResultRow> rows;  // sp, ll
  std::vector<ResultRow> hoplimit;
  LearningCurve nb;
  double nb_tail_hops = 0.0;
};

ExperimentSpec desk_spec() {
  ExperimentSpec spec;
  spec.topology_path = data("nsfnet.json");
  spec.topology_name = "nsfnet";
  spec.policies = {Policy::sp(), Policy::ll()};
  spec.x_values = {0.15};
  spec.capacity_range = std::pair{5, 27};
  spec.seeds = {1, 2, 3, 4, 5};
  spec.scenario_seed = 1;
  spec.events = 1'000'000;
  spec.parallel = {8, 250'000, 5};
  spec.window = 100'000;
  spec.nb_histogram_tail = 1'000'000;
  return spec;
}

Outcome policy_ordering(const DeskRuns& d) {
  Outcome out;
  const PointStats sp = stats(d.rows, "sp"), ll = stats(d.rows, "ll");
  const double nb = d.nb.aggregate.blocking_probability();
  out.require(ll.mean < sp.mean, "ll mean not below sp mean");
  out.require(ll.mean + ll.ci < sp.mean - sp.ci, "sp and ll 95% intervals overlap");
  out.require(nb < ll.mean, "nb-ll mean not below ll mean");
  out.require(nb < ll.mean - ll.ci, "nb-ll not below the ll interval");
  out.detail = (out.pass ? "" : out.detail + "; ") + "sp " + fmt("%.5f", sp.mean) + "+-" + fmt("%.5f", sp.ci) +
               ", ll " + fmt("%.5f", ll.mean) + "+-" + fmt("%.5f", ll.ci) + ", nb-ll " + fmt("%.5f", nb) +
               " (10^7 arrivals)";
  return out;
}

Outcome extra_hop_ordering(const DeskRuns& d) {
  Outcome out;
  const PointStats sp = stats(d.rows, "sp"), ll = stats(d.rows, "ll");
  out.require(d.nb_tail_hops < ll.hops, "nb-ll average extra hops not below ll");
  out.require(sp.hops < ll.hops, "sp average extra hops not below ll");
  out.detail = (out.pass ? "" : out.detail + "; ") + "avg extra hops sp " + fmt("%.4f", sp.hops) + ", ll " +
               fmt("%.4f", ll.hops) + ", nb-ll " + fmt("%.4f", d.nb_tail_hops) + " (last 10^6 arrivals)";
  return out;
}

Outcome hop_limit(const DeskRuns& d) {
  Outcome out;
  std::vector<PointStats> by_delta;
  std::string series;
  for (int delta = 0; delta <= 6; ++delta) {
    by_delta.push_back(stats(d.hoplimit, "ll-hoplimit:" + std::to_string(delta)));
    series += (delta ? " " : "") + fmt("%.5f", by_delta.back().mean);
  }
  const PointStats inf = stats(d.hoplimit, "ll-hoplimit:inf");
  for (int delta = 0; delta < 4; ++delta) {
    const double rise = by_delta[delta + 1].mean - by_delta[delta].mean;
    out.require(rise <= by_delta[delta].ci + by_delta[delta + 1].ci,
                "blocking rises from limit " + std::to_string(delta) + " to " + std::to_string(delta + 1));
  }
  out.require(std::abs(by_delta[6].mean - inf.mean) < by_delta[6].ci + inf.ci, "limit 6 and unlimited differ");
  std::size_t compared = 0;
  for (const ResultRow& unlimited : d.hoplimit) {
    if (unlimited.policy != "ll-hoplimit:inf") continue;
    for (const ResultRow& ll : d.hoplimit)
      if (ll.policy == "ll" && ll.seed == unlimited.seed) {
        out.require(ll.blocked == unlimited.blocked && ll.histogram == unlimited.histogram,
                    "unlimited differs from ll for seed " + std::to_string(ll.seed));
        ++compared;
      }
  }
  out.require(compared == d.spec.seeds.size(), "missing unlimited/ll pairs");
  out.detail = (out.pass ? "" : out.detail + "; ") + "limits 0..6: " + series + ", inf " + fmt("%.5f", inf.mean) +
               "; unlimited == ll on " + std::to_string(compared) + " seeds";
  return out;
}

Outcome learning_curve(const DeskRuns& d) {
  Outcome out;
  const auto& pts = d.nb.points;
  if (pts.size() < 2) {
    out.require(false, "curve has fewer than two windows");
    return out;
  }
  const WindowSample first = pts.front().window, last = pts.back().window;
  const double p1 = first.blocking_probability(), p2 = last.blocking_probability();
  const double sigma = std::sqrt(p1 * (1 - p1) / first.arrivals + p2 * (1 - p2) / last.arrivals);
  out.require(p1 - p2 > 3 * sigma, "final window not 3 sigma below the first");

  // Replay the first 10^4 decisions of the first worker with empty counters.
  const Topology base = Topology::from_file(d.spec.topology_path);
  const RouteCatalog catalog = enumerate_routes(base);
  const Scenario s = spec_scenario(d.spec, base, d.spec.x_values.front());
  SimConfig c = spec_config(d.spec, Policy::nb_ll(), d.spec.x_values.front(), d.spec.seeds.front());
  c.seed = worker_seed(d.spec.seeds.front(), 0, 0);
  c.num_events = 10'000;
  c.snapshot_log = true;
  const SimResult run = run_simulation(c, s, catalog, BayesCounters::for_topology(s.topology));
  const BayesCounters zero = BayesCounters::for_topology(s.topology);
  const std::vector<int> cap = s.topology.capacities();
  const double bp0 = p_block_prior(zero) * pair_mix(zero);
  std::size_t agree = 0, decisions = 0;
  for (const SnapshotRecord& rec : run.snapshots) {
    const Occupancy occ(rec.used);
    const auto eligible = eligible_routes(catalog, rec.pair, occ, cap);
    const PolicyDecision nb = select_nb_ll(eligible, occ, zero, c.alpha);
    const PolicyDecision lla = select_least_load(eligible, occ, cap, c.alpha);
    ++decisions;
    if (nb.blocked() || lla.blocked()) {
      agree += nb.blocked() == lla.blocked();
      continue;
    }
    const double load_nb = route_sum_load(*nb.route, occ, cap, c.alpha);
    const double load_lla = route_sum_load(*lla.route, occ, cap, c.alpha);
    agree += load_nb == load_lla && close_rel(nb.score, bp0 * load_lla, 1e-14);
  }
  out.require(agree == decisions, std::to_string(decisions - agree) + " of " + std::to_string(decisions) +
                                      " decisions disagree with alpha least-load");
  out.detail = (out.pass ? "" : out.detail + "; ") + "first window " + fmt("%.5f", p1) + " (" +
               std::to_string(first.arrivals) + "), final " + fmt("%.5f", p2) + " (" + std::to_string(last.arrivals) +
               "), gap " + fmt("%.1f", (p1 - p2) / sigma) + " sigma; " + std::to_string(agree) + "/" +
               std::to_string(decisions) + " empty-counter decisions match";
  return out;
}

// 9 -------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / ("nbll-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = NBLL_CLI_PATH;
  const std::string ns = data("nsfnet.json");

  {
    std::ofstream spec(dir / "sweep.json");
    spec << R"({"topology": ")" << ns << R"(", "policies": ["sp", "ll", "ll-hoplimit:2", "nb-ll"],
      "x": [0.15, 0.6], "capacity_range": [5, 27], "seeds": [1, 2], "events": 20000,
      "parallel": {"workers": 2, "events_per_subsim": 5000, "rounds": 2}, "window": 2500,
      "deltas": [0, 3, "inf"], "nb_histogram_tail": 5000})";
  }
  const std::string sim = cli + " simulate --topology " + ns + " --x 0.3 --capacity-range 5 27 --events 20000 --seed 4";
  const std::string spec = " --spec " + (dir / "sweep.json").string();
  const std::vector<std::pair<std::string, std::string>> runs{
      {"sp", sim + " --policy sp"},
      {"ll", sim + " --policy ll"},
      {"hoplimit", sim + " --policy ll-hoplimit --delta 2"},
      {"nbll", sim + " --policy nb-ll --workers 2 --events-per-subsim 5000 --rounds 2"},
      {"nbll-proc", sim + " --policy nb-ll --workers 2 --events-per-subsim 5000 --rounds 2 --processes"},
      {"sweep", cli + " sweep" + spec},
      {"hopstudy", cli + " hoplimit" + spec},
      {"curve", cli + " curve" + spec},
  };
  std::size_t identical = 0;
  for (const auto& [name, cmd] : runs) {
    std::string text[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path file = dir / (name + std::to_string(k) + ".csv");
      const fs::path err = dir / (name + ".err");
      const int code = std::system((cmd + " --out " + file.string() + " 2>" + err.string()).c_str());
      if (code != 0) {
        std::string msg = slurp(err);
        if (const auto at = msg.rfind("nbll:"); at != std::string::npos) msg = msg.substr(at);
        while (!msg.empty() && msg.back() == '\n') msg.pop_back();
        out.require(false, name + " exited with status " + std::to_string(code) + " (" + msg + ")");
      }
      text[k] = slurp(file);
    }
    out.require(!text[0].empty(), name + " wrote nothing");
    out.require(text[0] == text[1], name + " CSV differs between runs");
    identical += !text[0].empty() && text[0] == text[1];
  }
  out.require(slurp(dir / "nbll0.csv") == slurp(dir / "nbll-proc0.csv"), "process mode differs from threads");
  fs::remove_all(dir);
  if (out.pass) out.detail = std::to_string(identical) + " invocations byte identical across two runs";
  return out;
}

std::set<int> selected;

void report(int id, const char* name, const std::function<Outcome()>& check, bool& all) {
  if (!selected.empty() && !selected.count(id)) return;
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  all = all && o.pass;
  std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << " " << name << ": " << o.detail << " ["
            << fmt("%.1f s", seconds_since(start)) << "]" << std::endl;
}

}  // namespace

// Optional arguments restrict the run to the listed criterion numbers.
int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto wanted = [](int id) { return selected.empty() || selected.count(id) > 0; };

  bool all = true;
  report(1, "Erlang B oracle", erlang_b_oracle, all);
  report(2, "smoothing normalization", normalization, all);
  report(3, "prediction oracle", prediction_oracle, all);
  report(4, "merge algebra and parallel equivalence", merge_and_parallel, all);

  DeskRuns desk;
  std::string setup_error;
  if (wanted(5) || wanted(6) || wanted(7) || wanted(8)) {
    const auto start = std::chrono::steady_clock::now();
    try {
      desk.spec = desk_spec();
      desk.rows = run_experiment(desk.spec);
      ExperimentSpec hop = desk.spec;
      hop.deltas = {0, 1, 2, 3, 4, 5, 6, std::nullopt};
      desk.hoplimit = run_hoplimit_study(hop);
      ExperimentSpec nb = desk.spec;
      nb.policies = {Policy::nb_ll()};
      desk.nb = run_learning_curve(nb);
      desk.nb_tail_hops = average_extra_hops(desk.nb.aggregate.tail_extra_hops);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    std::cout << "desk-scale NSFNET runs finished in " << fmt("%.1f s", seconds_since(start)) << std::endl;
  }
  auto desk_check = [&](Outcome (*f)(const DeskRuns&)) {
    return [&, f] {
      if (!setup_error.empty()) throw std::runtime_error(setup_error);
      return f(desk);
    };
  };
  report(5, "policy ordering", desk_check(policy_ordering), all);
  report(6, "extra-hop ordering", desk_check(extra_hop_ordering), all);
  report(7, "hop-limit saturation", desk_check(hop_limit), all);
  report(8, "learning curve", desk_check(learning_curve), all);
  report(9, "CLI determinism", cli_determinism, all);
  return all ? 0 : 1;
}
