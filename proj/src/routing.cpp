#include "nbll/routing.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "nbll/errors.hpp"

namespace nbll {

Policy Policy::parse(std::string_view text) {
  if (text == "sp") return sp();
  if (text == "ll") return ll();
  if (text == "nb-ll") return nb_ll();
  constexpr std::string_view prefix = "ll-hoplimit:";
  if (text.substr(0, prefix.size()) == prefix) {
    auto arg = text.substr(prefix.size());
    if (arg == "inf") return ll_hoplimit(std::nullopt);
    int delta = 0;
    auto [end, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), delta);
    if (ec == std::errc() && end == arg.data() + arg.size() && delta >= 0) return ll_hoplimit(delta);
  }
  throw ConfigError("unknown policy \"" + std::string(text) + "\" (expected sp | ll | ll-hoplimit:<n|inf> | nb-ll)");
}

std::string Policy::name() const {
  switch (kind) {
    case PolicyKind::ShortestPath: return "sp";
    case PolicyKind::LeastLoaded: return "ll";
    case PolicyKind::NaiveBayesLeastLoaded: return "nb-ll";
    case PolicyKind::LeastLoadedHopLimit:
      return "ll-hoplimit:" + (delta_max ? std::to_string(*delta_max) : std::string("inf"));
  }
  return "?";
}

void eligible_routes(const RouteCatalog& catalog, PairId pair, const Occupancy& occ, std::span<const int> capacity,
                     std::vector<const Route*>& out) {
  out.clear();
  for (const Route& r : catalog.routes(pair))
    if (occ.fits(r, capacity)) out.push_back(&r);
}

std::vector<const Route*> eligible_routes(const RouteCatalog& catalog, PairId pair, const Occupancy& occ,
                                          std::span<const int> capacity) {
  std::vector<const Route*> out;
  eligible_routes(catalog, pair, occ, capacity, out);
  return out;
}

PolicyDecision select_sp(std::span<const Route* const> eligible) {
  PolicyDecision d;
  d.candidates_evaluated = static_cast<int>(eligible.size());
  const Route* best = nullptr;
  for (const Route* r : eligible)
    if (!best || r->hops() < best->hops()) best = r;
  if (best) {
    d.route = *best;
    d.score = best->hops();
  }
  return d;
}

LoadKeys::LoadKeys(std::span<const int> capacity) : factor_(capacity.size(), 0) {
  // Worst case sum: every link full on a route of every link.
  constexpr std::int64_t kLimit = std::int64_t{1} << 62;
  std::int64_t lcm = 1;
  exact_ = true;
  for (int w : capacity) {
    const std::int64_t step = w / std::gcd(lcm, static_cast<std::int64_t>(w));
    if (lcm > kLimit / step) {
      exact_ = false;
      break;
    }
    lcm *= step;
  }
  if (exact_ && static_cast<std::int64_t>(capacity.size()) > kLimit / lcm) exact_ = false;
  if (!exact_) return;
  for (std::size_t j = 0; j < capacity.size(); ++j) factor_[j] = lcm / capacity[j];
}

namespace {

struct Label {
  std::int64_t scaled = 0;
  double cost = 0.0;
  std::vector<LinkId> links;
  bool reached = false;
};

bool better(const LoadKeys& keys, std::int64_t scaled, double cost, const std::vector<LinkId>& links,
            const Label& than) {
  if (!than.reached) return true;
  if (int c = keys.compare(scaled, cost, than.scaled, than.cost); c != 0) return c < 0;
  if (links.size() != than.links.size()) return links.size() < than.links.size();
  return links < than.links;
}

}  // namespace

PolicyDecision select_ll(const Topology& topo, const Occupancy& occ, PairId pair, const LoadKeys& keys) {
  const auto [source, target] = topo.pair_nodes(pair);
  const std::size_t n = topo.node_count();
  std::vector<Label> label(n);
  std::vector<bool> settled(n, false);
  label[source].reached = true;

  PolicyDecision d;
  for (;;) {
    // Unsettled reached node with the smallest label.
    std::optional<NodeId> pick;
    for (NodeId v = 0; v < n; ++v) {
      if (settled[v] || !label[v].reached) continue;
      if (!pick) {
        pick = v;
        continue;
      }
      const Label& l = label[v];
      if (better(keys, l.scaled, l.cost, l.links, label[*pick])) pick = v;
    }
    if (!pick) break;
    const NodeId u = *pick;
    settled[u] = true;
    if (u == target) break;
    for (LinkId j : topo.incident(u)) {
      const Link& link = topo.link(j);
      if (occ[j] >= link.capacity) continue;
      const NodeId v = link.other(u);
      if (settled[v]) continue;
      ++d.candidates_evaluated;
      const std::int64_t scaled = label[u].scaled + keys.scaled(j, occ[j]);
      const double cost = label[u].cost + static_cast<double>(occ[j]) / link.capacity;
      std::vector<LinkId> links = label[u].links;
      links.push_back(j);
      if (better(keys, scaled, cost, links, label[v])) {
        label[v] = Label{scaled, cost, std::move(links), true};
      }
    }
  }
  if (label[target].reached) {
    d.route = Route{pair, label[target].links};
    d.score = label[target].cost;
  }
  return d;
}

PolicyDecision select_ll(const Topology& topo, const Occupancy& occ, PairId pair) {
  const auto capacity = topo.capacities();
  return select_ll(topo, occ, pair, LoadKeys(capacity));
}

PolicyDecision select_ll_hoplimit(std::span<const Route* const> eligible, const RouteCatalog& catalog,
                                  std::optional<int> delta_max, const Occupancy& occ, std::span<const int> capacity,
                                  const LoadKeys& keys) {
  if (delta_max && *delta_max < 0) throw ConfigError("extra-hop limit must be >= 0");
  PolicyDecision d;
  const Route* best = nullptr;
  std::int64_t best_scaled = 0;
  double best_cost = 0.0;
  for (const Route* r : eligible) {
    if (delta_max && extra_hops(*r, catalog) > *delta_max) continue;
    ++d.candidates_evaluated;
    std::int64_t scaled = 0;
    for (LinkId j : r->links) scaled += keys.scaled(j, occ[j]);
    const double cost = route_sum_load(*r, occ, capacity, 0.0);
    const int c = best ? keys.compare(scaled, cost, best_scaled, best_cost) : -1;
    if (c < 0 || (c == 0 && r->hops() < best->hops())) {
      best = r;
      best_scaled = scaled;
      best_cost = cost;
    }
  }
  if (best) {
    d.route = *best;
    d.score = best_cost;
  }
  return d;
}

PolicyDecision select_ll_hoplimit(std::span<const Route* const> eligible, const RouteCatalog& catalog,
                                  std::optional<int> delta_max, const Occupancy& occ, std::span<const int> capacity) {
  return select_ll_hoplimit(eligible, catalog, delta_max, occ, capacity, LoadKeys(capacity));
}

PolicyDecision select_least_load(std::span<const Route* const> eligible, const Occupancy& occ,
                                 std::span<const int> capacity, double alpha) {
  PolicyDecision d;
  const Route* best = nullptr;
  double best_cost = 0.0;
  for (const Route* r : eligible) {
    ++d.candidates_evaluated;
    const double cost = route_sum_load(*r, occ, capacity, alpha);
    if (!best || cost < best_cost || (cost == best_cost && r->hops() < best->hops())) {
      best = r;
      best_cost = cost;
    }
  }
  if (best) {
    d.route = *best;
    d.score = best_cost;
  }
  return d;
}

double NbLlSelector::link_delta(const BayesCounters& c, LinkId j, int u) {
  if (stamp_[j] == epoch_) return delta_[j];
  // ratio_j(u+1) - ratio_j(u); the (B + W + 1) and (H + W + 1) terms cancel.
  const double value = std::log(static_cast<double>(c.occ_blocked(j, u + 1)) + 1.0) -
                       std::log(static_cast<double>(c.occ_total(j, u + 1)) + 1.0) -
                       std::log(static_cast<double>(c.occ_blocked(j, u)) + 1.0) +
                       std::log(static_cast<double>(c.occ_total(j, u)) + 1.0);
  delta_[j] = value;
  stamp_[j] = epoch_;
  return value;
}

PolicyDecision NbLlSelector::select(std::span<const Route* const> eligible, const Occupancy& occ,
                                    const BayesCounters& counters, double alpha) {
  PolicyDecision d;
  if (eligible.empty()) return d;
  const std::size_t links = counters.link_count();
  if (occ.size() != links) throw ConsistencyError("snapshot size does not match counters");
  if (delta_.size() != links) {
    delta_.assign(links, 0.0);
    stamp_.assign(links, 0);
    epoch_ = 0;
  }
  ++epoch_;

  std::vector<double> base_terms(links);
  for (LinkId j = 0; j < links; ++j) base_terms[j] = link_log_ratio(counters, j, occ[j]);
  const double base_log = compensated_sum(base_terms);
  const double scale = p_block_prior(counters) * pair_mix(counters);
  const std::span<const int> capacity = counters.capacities();

  const Route* best = nullptr;
  double best_score = 0.0;
  for (const Route* r : eligible) {
    double shift = 0.0;
    for (LinkId j : r->links) shift += link_delta(counters, j, occ[j]);
    const double bp_net = scale * std::exp(base_log + shift);
    const double score = bp_net * route_sum_load(*r, occ, capacity, alpha);
    ++d.candidates_evaluated;
    if (!best || score < best_score || (score == best_score && r->hops() < best->hops())) {
      best = r;
      best_score = score;
    }
  }
  d.route = *best;
  d.score = best_score;
  return d;
}

PolicyDecision select_nb_ll(std::span<const Route* const> eligible, const Occupancy& occ,
                            const BayesCounters& counters, double alpha) {
  NbLlSelector selector;
  return selector.select(eligible, occ, counters, alpha);
}

}  // namespace nbll
