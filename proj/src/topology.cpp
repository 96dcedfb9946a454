#include "nbll/topology.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "nbll/errors.hpp"

namespace nbll {

namespace {

using json = nlohmann::json;

bool is_connected(std::size_t node_count, const std::vector<std::vector<LinkId>>& adjacency,
                  const std::vector<Link>& links) {
  if (node_count == 0) return true;
  std::vector<bool> seen(node_count, false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    for (LinkId j : adjacency[n]) {
      NodeId m = links[j].other(n);
      if (!seen[m]) {
        seen[m] = true;
        ++reached;
        stack.push_back(m);
      }
    }
  }
  return reached == node_count;
}

}  // namespace

Topology::Topology(std::vector<std::string> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)), adjacency_(nodes_.size()) {
  if (nodes_.size() < 2) throw TopologyError("topology needs at least two nodes");
  {
    std::unordered_map<std::string, std::size_t> names;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!names.emplace(nodes_[i], i).second)
        throw TopologyError("nodes[" + std::to_string(i) + "]: duplicate node name \"" + nodes_[i] + "\"");
    }
  }
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& l = links_[i];
    const std::string where = "links[" + std::to_string(i) + "]";
    if (l.id != i) throw TopologyError(where + ": link id " + std::to_string(l.id) + " is not " + std::to_string(i));
    if (l.a >= nodes_.size() || l.b >= nodes_.size()) throw TopologyError(where + ": endpoint out of range");
    if (l.a == l.b) throw TopologyError(where + ": self-loop on node \"" + nodes_[l.a] + "\"");
    if (l.capacity < 1) throw TopologyError(where + ": capacity must be >= 1");
    adjacency_[l.a].push_back(l.id);
    adjacency_[l.b].push_back(l.id);
  }
  if (!is_connected(nodes_.size(), adjacency_, links_)) throw TopologyError("topology is disconnected");

  pair_nodes_.reserve(pair_count());
  for (NodeId s = 0; s < nodes_.size(); ++s)
    for (NodeId d = s + 1; d < nodes_.size(); ++d) pair_nodes_.emplace_back(s, d);
}

Topology Topology::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TopologyError(std::string("topology: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw TopologyError("topology: top level must be an object");
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw TopologyError("topology: missing array field \"nodes\"");
  if (!doc.contains("links") || !doc["links"].is_array()) throw TopologyError("topology: missing array field \"links\"");

  std::vector<std::string> nodes;
  std::unordered_map<std::string, NodeId> index;
  for (std::size_t i = 0; i < doc["nodes"].size(); ++i) {
    const json& n = doc["nodes"][i];
    if (!n.is_string()) throw TopologyError("nodes[" + std::to_string(i) + "]: expected a string");
    auto name = n.get<std::string>();
    if (!index.emplace(name, static_cast<NodeId>(i)).second)
      throw TopologyError("nodes[" + std::to_string(i) + "]: duplicate node name \"" + name + "\"");
    nodes.push_back(std::move(name));
  }

  std::vector<Link> links;
  std::unordered_map<std::uint64_t, std::size_t> seen_ids;
  for (std::size_t i = 0; i < doc["links"].size(); ++i) {
    const json& l = doc["links"][i];
    const std::string where = "links[" + std::to_string(i) + "]";
    if (!l.is_object()) throw TopologyError(where + ": expected an object");
    for (const char* field : {"id", "a", "b", "capacity"}) {
      if (!l.contains(field)) throw TopologyError(where + ": missing field \"" + field + "\"");
    }
    if (!l["id"].is_number_unsigned()) throw TopologyError(where + ".id: expected a non-negative integer");
    if (!l["capacity"].is_number_integer()) throw TopologyError(where + ".capacity: expected an integer");
    const auto id = l["id"].get<std::uint64_t>();
    if (auto [it, fresh] = seen_ids.emplace(id, i); !fresh)
      throw TopologyError(where + ".id: duplicate link id " + std::to_string(id) + " (first at links[" +
                          std::to_string(it->second) + "])");
    if (id != i) throw TopologyError(where + ".id: link ids must be 0..L-1 in file order, got " + std::to_string(id));

    auto endpoint = [&](const char* field) {
      if (!l[field].is_string()) throw TopologyError(where + "." + field + ": expected a node name");
      auto name = l[field].get<std::string>();
      auto it = index.find(name);
      if (it == index.end()) throw TopologyError(where + "." + field + ": unknown node \"" + name + "\"");
      return it->second;
    };
    Link link;
    link.id = static_cast<LinkId>(id);
    link.a = endpoint("a");
    link.b = endpoint("b");
    link.capacity = l["capacity"].get<int>();
    if (link.a == link.b) throw TopologyError(where + ": self-loop on node \"" + nodes[link.a] + "\"");
    if (link.capacity < 1) throw TopologyError(where + ".capacity: must be >= 1");
    links.push_back(link);
  }
  return Topology(std::move(nodes), std::move(links));
}

Topology Topology::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot open topology file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json(buf.str());
  } catch (const TopologyError& e) {
    throw TopologyError(path + ": " + e.what());
  }
}

std::optional<NodeId> Topology::find_node(std::string_view name) const {
  auto it = std::find(nodes_.begin(), nodes_.end(), name);
  if (it == nodes_.end()) return std::nullopt;
  return static_cast<NodeId>(it - nodes_.begin());
}

PairId Topology::pair_index(NodeId s, NodeId d) const {
  if (s > d) std::swap(s, d);
  const std::size_t n = node_count();
  // Pairs before row s: sum_{r<s} (n-1-r).
  const std::size_t before = s * (2 * n - s - 1) / 2;
  return static_cast<PairId>(before + (d - s - 1));
}

std::string Topology::pair_name(PairId pair) const {
  auto [s, d] = pair_nodes_[pair];
  return nodes_[s] + "-" + nodes_[d];
}

std::vector<int> Topology::capacities() const {
  std::vector<int> out;
  out.reserve(links_.size());
  for (const Link& l : links_) out.push_back(l.capacity);
  return out;
}

Topology Topology::with_capacities(std::span<const int> capacities) const {
  if (capacities.size() != links_.size()) throw TopologyError("capacity vector size does not match link count");
  std::vector<Link> links = links_;
  for (std::size_t j = 0; j < links.size(); ++j) links[j].capacity = capacities[j];
  return Topology(nodes_, std::move(links));
}

std::string Topology::to_json() const {
  json doc;
  doc["nodes"] = nodes_;
  doc["links"] = json::array();
  for (const Link& l : links_)
    doc["links"].push_back({{"id", l.id}, {"a", nodes_[l.a]}, {"b", nodes_[l.b]}, {"capacity", l.capacity}});
  return doc.dump(2);
}

RouteCatalog::RouteCatalog(std::vector<std::vector<Route>> routes, std::size_t link_count)
    : routes_(std::move(routes)), link_count_(link_count) {}

std::size_t RouteCatalog::total_routes() const {
  return std::accumulate(routes_.begin(), routes_.end(), std::size_t{0},
                         [](std::size_t acc, const auto& rs) { return acc + rs.size(); });
}

int RouteCatalog::max_hops() const {
  int best = 0;
  for (const auto& rs : routes_)
    for (const Route& r : rs) best = std::max(best, r.hops());
  return best;
}

namespace {

struct PathSearch {
  const Topology& topo;
  int bound;
  std::vector<bool> on_path;
  std::vector<LinkId> links;

  // Appends every simple path from `node` to `target` to `out`.
  void walk(NodeId node, NodeId target, PairId pair, std::vector<Route>& out) {
    if (node == target) {
      out.push_back(Route{pair, links});
      return;
    }
    if (static_cast<int>(links.size()) >= bound) return;
    for (LinkId j : topo.incident(node)) {
      NodeId next = topo.link(j).other(node);
      if (on_path[next]) continue;
      on_path[next] = true;
      links.push_back(j);
      walk(next, target, pair, out);
      links.pop_back();
      on_path[next] = false;
    }
  }
};

}  // namespace

RouteCatalog enumerate_routes(const Topology& topo, std::optional<int> hop_bound) {
  const int bound = hop_bound.value_or(static_cast<int>(topo.link_count()));
  if (bound < 1) throw TopologyError("hop bound must be >= 1");
  std::vector<std::vector<Route>> all(topo.pair_count());
  PathSearch search{topo, bound, std::vector<bool>(topo.node_count(), false), {}};
  for (PairId p = 0; p < topo.pair_count(); ++p) {
    auto [s, d] = topo.pair_nodes(p);
    search.on_path[s] = true;
    search.walk(s, d, p, all[p]);
    search.on_path[s] = false;
    if (all[p].empty())
      throw TopologyError("hop bound " + std::to_string(bound) + " leaves pair " + topo.pair_name(p) +
                          " without a route");
    std::sort(all[p].begin(), all[p].end(), [](const Route& x, const Route& y) {
      if (x.hops() != y.hops()) return x.hops() < y.hops();
      return x.links < y.links;
    });
  }
  return RouteCatalog(std::move(all), topo.link_count());
}

Route route_from_nodes(const Topology& topo, std::span<const NodeId> path) {
  if (path.size() < 2) throw TopologyError("route needs at least two nodes");
  Route r;
  r.pair = topo.pair_index(path.front(), path.back());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    std::optional<LinkId> hit;
    for (LinkId j : topo.incident(path[i]))
      if (topo.link(j).other(path[i]) == path[i + 1]) hit = j;
    if (!hit) throw TopologyError("nodes " + topo.nodes()[path[i]] + " and " + topo.nodes()[path[i + 1]] + " are not adjacent");
    r.links.push_back(*hit);
  }
  // Catalog orientation: from the lower node id.
  if (path.front() > path.back()) std::reverse(r.links.begin(), r.links.end());
  return r;
}

}  // namespace nbll
