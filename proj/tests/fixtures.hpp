#pragma once

#include <random>
#include <string>
#include <vector>

#include "nbll/occupancy.hpp"
#include "nbll/topology.hpp"

namespace fixture {

inline std::string data(const std::string& file) { return std::string(NBLL_DATA_DIR) + "/" + file; }

inline nbll::Topology triangle() { return nbll::Topology::from_file(data("triangle.json")); }
inline nbll::Topology nsfnet() { return nbll::Topology::from_file(data("nsfnet.json")); }
inline nbll::Topology arpa2() { return nbll::Topology::from_file(data("arpa2.json")); }

// Named-node helper: links given as endpoint pairs, ids in order.
inline nbll::Topology graph(std::vector<std::string> nodes, const std::vector<std::pair<int, int>>& edges,
                            int capacity) {
  std::vector<nbll::Link> links;
  for (std::size_t i = 0; i < edges.size(); ++i)
    links.push_back({static_cast<nbll::LinkId>(i), static_cast<nbll::NodeId>(edges[i].first),
                     static_cast<nbll::NodeId>(edges[i].second), capacity});
  return nbll::Topology(std::move(nodes), std::move(links));
}

inline nbll::Topology line4() { return graph({"A", "B", "C", "D"}, {{0, 1}, {1, 2}, {2, 3}}, 2); }
inline nbll::Topology ring4() { return graph({"A", "B", "C", "D"}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, 2); }

// The least-loaded counterexample network: S-1-2-3-D with utilizations
// 0.24, 0.25, 0.25, 0.25 against the two-hop S-4-D at 0.5, 0.5.
struct Fig1 {
  nbll::Topology topo = graph({"S", "1", "2", "3", "4", "D"}, {{0, 1}, {1, 2}, {2, 3}, {3, 5}, {0, 4}, {4, 5}}, 100);
  nbll::Occupancy occ{std::vector<int>{24, 25, 25, 25, 50, 50}};
  nbll::PairId pair = topo.pair_index(0, 5);
};

inline nbll::Occupancy random_occupancy(std::mt19937_64& gen, const std::vector<int>& capacity) {
  std::vector<int> used(capacity.size());
  for (std::size_t j = 0; j < used.size(); ++j) used[j] = std::uniform_int_distribution<int>(0, capacity[j])(gen);
  return nbll::Occupancy(std::move(used));
}

}  // namespace fixture
