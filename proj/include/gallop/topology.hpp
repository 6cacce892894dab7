#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gallop/rng.hpp"
#include "gallop/types.hpp"

namespace gallop {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

enum class ControllerAnchor { Corner, Center };

struct MeshTopology {
  std::map<NodeId, Point> positions;  // includes the controller
  double region_side = 0.0;
  double comm_range = 30.0;
  NodeId controller = kController;

  std::set<NodeId> neighbors_of(NodeId n) const;
};

struct PoissonOptions {
  double comm_range = 30.0;
  ControllerAnchor anchor = ControllerAnchor::Corner;
};

struct DisconnectedTopology : Error {
  DisconnectedTopology(std::vector<NodeId> unreachable_nodes);
  std::vector<NodeId> unreachable;
};

struct TreeTopology {
  NodeId controller = kController;
  std::map<NodeId, NodeId> parent;                 // non-controller nodes only
  std::map<NodeId, std::vector<NodeId>> children;  // ascending NodeId = priority order
  std::map<NodeId, std::set<NodeId>> neighbors;
  std::map<NodeId, double> rank;
  std::map<NodeId, Point> positions;  // may be empty for abstract specs
  double default_link_distance = 15.0;
  std::string name;

  std::vector<NodeId> nodes() const;
  std::size_t size() const { return neighbors.size(); }
  const std::vector<NodeId>& children_of(NodeId n) const;
  bool is_leaf(NodeId n) const { return children_of(n).empty(); }
  bool in_range(NodeId a, NodeId b) const;
  int priority(NodeId n) const;  // 1-based position among its siblings
  int depth(NodeId n) const;
  int max_hops() const;
  int subtree_size(NodeId n) const;  // includes n
  bool in_subtree(NodeId root, NodeId n) const;
  std::vector<NodeId> siblings(NodeId n) const;
  std::vector<NodeId> bfs_order() const;  // controller first, siblings by priority
  std::vector<NodeId> parents_in_bfs() const;
  double link_distance(NodeId a, NodeId b) const;
  // Uplink packet order of node n: own packet first, then each child's order by priority.
  std::vector<NodeId> uplink_order(NodeId n) const;
};

MeshTopology generate_poisson(double mean, double side, std::uint64_t seed,
                              const PoissonOptions& opts = {});

TreeTopology build_tree(const MeshTopology& mesh);

struct PoissonDraw {
  TreeTopology tree;
  int rejected = 0;
};

// Resamples disconnected draws; the k-th attempt uses derive_seed(seed, k).
PoissonDraw draw_connected_tree(double mean, double side, std::uint64_t seed,
                                const PoissonOptions& opts = {}, int max_attempts = 10000);

struct FixedSpec {
  std::string name;
  NodeId controller = kController;
  std::vector<NodeId> nodes;
  std::map<NodeId, NodeId> parent;
  std::map<NodeId, std::set<NodeId>> neighbors;
  std::map<NodeId, Point> positions;
  double default_link_distance = 15.0;
};

TreeTopology load_fixed(const FixedSpec& spec);
FixedSpec parse_fixed_spec(const std::string& text);
std::string serialize_fixed_spec(const FixedSpec& spec);
FixedSpec spec_from_tree(const TreeTopology& tree);
TreeTopology load_fixed_file(const std::string& path);

// Bundled shapes: "fig2", "fig4" (same network), "fig8", "fig6", "topology-a", "topology-b".
TreeTopology bundled_topology(const std::string& name);
std::vector<std::string> bundled_topology_names();

// Controller with K leaves; children placed on a circle of the given radius, all mutually in range
// unless spread forces otherwise.
TreeTopology star_topology(int k, double radius = 10.0, double comm_range = 30.0);

// Controller with K leaves placed uniformly at random in a disk of radius r_p.
TreeTopology random_star(int k, double r_p, std::uint64_t seed, double comm_range = -1.0);

}  // namespace gallop
