#pragma once

// Network graph, link capacities and the offline route catalog.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nbll {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;
/// Index of an unordered node pair; see Topology::pair_index().
using PairId = std::uint32_t;

struct Link {
  LinkId id = 0;
  NodeId a = 0;
  NodeId b = 0;
  int capacity = 1;

  NodeId other(NodeId n) const { return n == a ? b : a; }
};

/// Undirected graph with integer link capacities. Immutable once built.
class Topology {
 public:
  /// Validates: endpoints exist and differ, ids dense in file order,
  /// capacities >= 1, graph connected.
  Topology(std::vector<std::string> nodes, std::vector<Link> links);

  /// Parses the JSON topology format ({"nodes": [...], "links": [{id,a,b,capacity}]}).
  static Topology from_json(std::string_view text);
  static Topology from_file(const std::string& path);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t pair_count() const { return node_count() * (node_count() - 1) / 2; }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_[id]; }
  const std::vector<LinkId>& incident(NodeId n) const { return adjacency_[n]; }

  std::optional<NodeId> find_node(std::string_view name) const;

  /// Unordered pair index, row-major over the upper triangle: (0,1)=0, (0,2)=1, ...
  PairId pair_index(NodeId s, NodeId d) const;
  /// Endpoints of a pair, lower node id first.
  std::pair<NodeId, NodeId> pair_nodes(PairId pair) const { return pair_nodes_[pair]; }
  std::string pair_name(PairId pair) const;

  std::vector<int> capacities() const;
  /// Copy with capacities replaced (one entry per link, each >= 1).
  Topology with_capacities(std::span<const int> capacities) const;

  std::string to_json() const;

 private:
  std::vector<std::string> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> adjacency_;
  std::vector<std::pair<NodeId, NodeId>> pair_nodes_;
};

/// A simple path between the endpoints of `pair`, links ordered from the
/// pair's lower node id to its higher one.
struct Route {
  PairId pair = 0;
  std::vector<LinkId> links;

  int hops() const { return static_cast<int>(links.size()); }
  friend bool operator==(const Route&, const Route&) = default;
};

/// Candidate simple paths per node pair, sorted by (hops, link list).
class RouteCatalog {
 public:
  RouteCatalog() = default;
  RouteCatalog(std::vector<std::vector<Route>> routes, std::size_t link_count);

  const std::vector<Route>& routes(PairId pair) const { return routes_[pair]; }
  int shortest_hops(PairId pair) const { return routes_[pair].front().hops(); }
  std::size_t pair_count() const { return routes_.size(); }
  std::size_t link_count() const { return link_count_; }
  std::size_t total_routes() const;
  int max_hops() const;

 private:
  std::vector<std::vector<Route>> routes_;
  std::size_t link_count_ = 0;
};

/// Every simple path per pair with at most `hop_bound` hops (all when unset).
/// Throws TopologyError naming the first pair left without a route.
RouteCatalog enumerate_routes(const Topology& topo, std::optional<int> hop_bound = std::nullopt);

/// Builds a route from a node sequence; throws if consecutive nodes are not adjacent.
Route route_from_nodes(const Topology& topo, std::span<const NodeId> path);

/// Number of hops by which `route` exceeds the pair's shortest catalog route.
inline int extra_hops(const Route& route, const RouteCatalog& catalog) {
  return route.hops() - catalog.shortest_hops(route.pair);
}

}  // namespace nbll
