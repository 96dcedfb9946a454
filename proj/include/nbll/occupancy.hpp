#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbll/errors.hpp"
#include "nbll/topology.hpp"

namespace nbll {

/// Busy capacity units per link: the network snapshot taken at each arrival.
class Occupancy {
 public:
  Occupancy() = default;
  explicit Occupancy(std::size_t link_count) : used_(link_count, 0) {}
  explicit Occupancy(std::vector<int> used) : used_(std::move(used)) {}

  int operator[](LinkId j) const { return used_[j]; }
  std::span<const int> used() const { return used_; }
  std::size_t size() const { return used_.size(); }

  /// True when every link of `route` has a free unit.
  bool fits(const Route& route, std::span<const int> capacity) const {
    for (LinkId j : route.links)
      if (used_[j] >= capacity[j]) return false;
    return true;
  }

  void admit(const Route& route, std::span<const int> capacity) {
    for (LinkId j : route.links) {
      if (used_[j] >= capacity[j]) throw ConsistencyError("admit over capacity on link " + std::to_string(j));
    }
    for (LinkId j : route.links) ++used_[j];
  }

  void release(const Route& route) {
    for (LinkId j : route.links) {
      if (used_[j] <= 0) throw ConsistencyError("double release on link " + std::to_string(j));
    }
    for (LinkId j : route.links) --used_[j];
  }

  friend bool operator==(const Occupancy&, const Occupancy&) = default;

 private:
  std::vector<int> used_;
};

/// Sum of per-link utilization U/W (+ alpha per link) along the route, folded
/// from the route's first link.
inline double route_sum_load(const Route& route, const Occupancy& occ, std::span<const int> capacity,
                             double alpha) {
  double cost = 0.0;
  for (LinkId j : route.links) cost += static_cast<double>(occ[j]) / capacity[j] + alpha;
  return cost;
}

inline double route_sum_load(const Route& route, const Occupancy& occ, const Topology& topo, double alpha) {
  double cost = 0.0;
  for (LinkId j : route.links) cost += static_cast<double>(occ[j]) / topo.link(j).capacity + alpha;
  return cost;
}

}  // namespace nbll
