#pragma once

// Route-selection policies. Every selector returns a PolicyDecision that is
// blocked exactly when no eligible route exists; ties are broken by fewest
// hops, then by catalog (lexicographic link list) order.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nbll/learner.hpp"
#include "nbll/occupancy.hpp"
#include "nbll/topology.hpp"

namespace nbll {

enum class PolicyKind { ShortestPath, LeastLoaded, LeastLoadedHopLimit, NaiveBayesLeastLoaded };

struct Policy {
  PolicyKind kind = PolicyKind::ShortestPath;
  /// Extra-hop limit for LeastLoadedHopLimit; unset means unlimited.
  std::optional<int> delta_max;

  /// Parses `sp | ll | ll-hoplimit:<int|inf> | nb-ll`.
  static Policy parse(std::string_view text);
  std::string name() const;

  static Policy sp() { return {PolicyKind::ShortestPath, std::nullopt}; }
  static Policy ll() { return {PolicyKind::LeastLoaded, std::nullopt}; }
  static Policy nb_ll() { return {PolicyKind::NaiveBayesLeastLoaded, std::nullopt}; }
  static Policy ll_hoplimit(std::optional<int> delta) { return {PolicyKind::LeastLoadedHopLimit, delta}; }

  friend bool operator==(const Policy&, const Policy&) = default;
};

struct PolicyDecision {
  std::optional<Route> route;
  double score = 0.0;
  int candidates_evaluated = 0;

  bool blocked() const { return !route.has_value(); }
};

/// Exact link loads: U_j / W_j scaled by the least common multiple of all
/// capacities, so sum-load comparisons between routes are free of rounding.
/// Falls back to floating-point keys when the scaled sums could overflow.
class LoadKeys {
 public:
  explicit LoadKeys(std::span<const int> capacity);

  bool exact() const { return exact_; }
  std::int64_t scaled(LinkId j, int used) const { return factor_[j] * used; }

  /// Three-way comparison of two sum-loads given as (scaled, floating) pairs.
  int compare(std::int64_t scaled_a, double approx_a, std::int64_t scaled_b, double approx_b) const {
    if (exact_) return scaled_a < scaled_b ? -1 : (scaled_a > scaled_b ? 1 : 0);
    return approx_a < approx_b ? -1 : (approx_a > approx_b ? 1 : 0);
  }

 private:
  std::vector<std::int64_t> factor_;
  bool exact_ = false;
};

/// Catalog routes of `pair` with a free unit on every link, in catalog order.
std::vector<const Route*> eligible_routes(const RouteCatalog& catalog, PairId pair, const Occupancy& occ,
                                          std::span<const int> capacity);
void eligible_routes(const RouteCatalog& catalog, PairId pair, const Occupancy& occ, std::span<const int> capacity,
                     std::vector<const Route*>& out);

/// Adaptive shortest path: fewest hops among eligible routes.
PolicyDecision select_sp(std::span<const Route* const> eligible);

/// Conventional least-loaded routing: Dijkstra over links with a free unit,
/// link cost U/W, labels compared by (cost, hops, link list).
PolicyDecision select_ll(const Topology& topo, const Occupancy& occ, PairId pair, const LoadKeys& keys);
PolicyDecision select_ll(const Topology& topo, const Occupancy& occ, PairId pair);

/// Least sum-load (alpha = 0) among eligible routes within `delta_max` extra hops.
PolicyDecision select_ll_hoplimit(std::span<const Route* const> eligible, const RouteCatalog& catalog,
                                  std::optional<int> delta_max, const Occupancy& occ, std::span<const int> capacity,
                                  const LoadKeys& keys);
PolicyDecision select_ll_hoplimit(std::span<const Route* const> eligible, const RouteCatalog& catalog,
                                  std::optional<int> delta_max, const Occupancy& occ, std::span<const int> capacity);

/// Least alpha-augmented sum-load among eligible routes (the NB-LL cost
/// without the blocking factor).
PolicyDecision select_least_load(std::span<const Route* const> eligible, const Occupancy& occ,
                                 std::span<const int> capacity, double alpha);

/// Scores candidates by predicted network blocking after admission times
/// alpha-augmented sum-load, and picks the minimum.
///
/// Adding a route to the snapshot only changes the occupancy of its own
/// links, so each candidate's log blocking score is the current one plus
/// sum_{j in route} [ratio_j(U_j + 1) - ratio_j(U_j)]. The per-link deltas
/// are computed once per request and cached.
class NbLlSelector {
 public:
  PolicyDecision select(std::span<const Route* const> eligible, const Occupancy& occ, const BayesCounters& counters,
                        double alpha);

 private:
  double link_delta(const BayesCounters& counters, LinkId j, int u);

  std::vector<double> delta_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
};

PolicyDecision select_nb_ll(std::span<const Route* const> eligible, const Occupancy& occ,
                            const BayesCounters& counters, double alpha);

}  // namespace nbll
