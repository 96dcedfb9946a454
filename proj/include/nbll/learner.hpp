#pragma once

// Naive Bayes blocking predictor for circuit-switched routing.
//
// Features of an arrival are the network snapshot (busy units U_j on every
// link) and the requesting node pair; the class is blocked / served. All
// probabilities are Laplace-smoothed at every sample size:
//
//   P(Y=1)          = (B + 1) / (H + 2)
//   P(U_j=u | Y=1)  = (blocked_j[u] + 1) / (B + W_j + 1)
//   P(U_j=u)        = (total_j[u] + 1) / (H + W_j + 1)
//   P(sd | Y=1)     = (pair_blocked[sd] + 1) / (B + m)
//   P(sd)           = (pair_total[sd] + 1) / (H + m)
//
// and the traffic weight of a pair reuses the P(sd) estimator.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nbll/occupancy.hpp"
#include "nbll/topology.hpp"

namespace nbll {

/// Sufficient statistics of the classifier. A plain mergeable value.
class BayesCounters {
 public:
  BayesCounters() = default;
  BayesCounters(std::vector<int> capacities, std::size_t pair_count);

  static BayesCounters for_topology(const Topology& topo) { return {topo.capacities(), topo.pair_count()}; }

  /// Records one arrival, served or blocked. Throws ConsistencyError on a
  /// snapshot that does not fit the capacity vector.
  void observe(std::span<const int> snapshot, PairId pair, bool blocked);
  void observe(const Occupancy& snapshot, PairId pair, bool blocked) { observe(snapshot.used(), pair, blocked); }

  std::uint64_t arrivals() const { return arrivals_; }
  std::uint64_t blocked() const { return blocked_; }
  std::uint64_t occ_blocked(LinkId j, int u) const { return occ_blocked_[offset_[j] + u]; }
  std::uint64_t occ_total(LinkId j, int u) const { return occ_total_[offset_[j] + u]; }
  std::uint64_t pair_blocked(PairId sd) const { return pair_blocked_[sd]; }
  std::uint64_t pair_total(PairId sd) const { return pair_total_[sd]; }

  const std::vector<int>& capacities() const { return capacities_; }
  int capacity(LinkId j) const { return capacities_[j]; }
  std::size_t link_count() const { return capacities_.size(); }
  std::size_t pair_count() const { return pair_total_.size(); }

  /// True when both were built for the same capacities and pair count.
  bool compatible(const BayesCounters& other) const;

  /// Componentwise sum. Throws ConfigError on shape mismatch.
  BayesCounters& merge(const BayesCounters& other);
  /// Componentwise difference; `other` must be a prefix state of *this.
  BayesCounters minus(const BayesCounters& other) const;

  /// Checks every marginal identity (sum over u of each histogram, pair sums).
  bool consistent() const;

  friend bool operator==(const BayesCounters&, const BayesCounters&) = default;

  // Checkpoint format: JSON, fixed key order, byte-stable for a given state.
  std::string to_json() const;
  static BayesCounters from_json(const std::string& text);
  void save(const std::string& path) const;
  static BayesCounters load(const std::string& path);

 private:
  void check_link(LinkId j, int u) const;

  std::vector<int> capacities_;
  std::vector<std::size_t> offset_;  // start of link j's histogram, size W_j + 1
  std::uint64_t arrivals_ = 0;
  std::uint64_t blocked_ = 0;
  std::vector<std::uint64_t> occ_blocked_;
  std::vector<std::uint64_t> occ_total_;
  std::vector<std::uint64_t> pair_blocked_;
  std::vector<std::uint64_t> pair_total_;
};

inline BayesCounters merge(BayesCounters a, const BayesCounters& b) { return a.merge(b); }

double p_block_prior(const BayesCounters& c);
double p_occ_given_block(const BayesCounters& c, LinkId j, int u);
double p_occ(const BayesCounters& c, LinkId j, int u);
double p_pair_given_block(const BayesCounters& c, PairId sd);
double p_pair(const BayesCounters& c, PairId sd);
double traffic_weight(const BayesCounters& c, PairId sd);

/// log(P(U_j=u|Y=1) / P(U_j=u)).
double link_log_ratio(const BayesCounters& c, LinkId j, int u);

/// The Bayes score P(Y=1 | S, sd). Not a normalized posterior: P(X) is
/// estimated independently of the class-conditional product, so the value
/// can exceed 1. Used raw for ranking.
struct Prediction {
  double value = 0.0;
  std::vector<double> log_terms;  // per-link log ratios

  double clamped() const { return value > 1.0 ? 1.0 : value; }
};

Prediction predict_pair_bp(const BayesCounters& c, std::span<const int> snapshot, PairId sd);

/// Traffic-weighted network blocking score over all pairs, factored as
/// P(Y=1) * exp(sum_j log ratio_j) * sum_sd' weight(sd') * P(sd'|Y=1) / P(sd').
double predict_network_bp(const BayesCounters& c, std::span<const int> snapshot);

/// sum_sd' weight(sd') * P(sd'|Y=1) / P(sd'): the pair-dependent factor of
/// predict_network_bp, independent of the snapshot.
double pair_mix(const BayesCounters& c);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> terms);

}  // namespace nbll
