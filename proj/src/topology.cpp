#include "gallop/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace gallop {

std::string to_string(FrameKind k) {
  switch (k) {
    case FrameKind::Downlink: return "downlink";
    case FrameKind::Uplink: return "uplink";
    case FrameKind::Retransmission: return "retransmission";
  }
  return "?";
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::set<NodeId> MeshTopology::neighbors_of(NodeId n) const {
  std::set<NodeId> out;
  auto self = positions.at(n);
  for (const auto& [id, p] : positions)
    if (id != n && distance(self, p) <= comm_range) out.insert(id);
  return out;
}

static std::string join_ids(const std::vector<NodeId>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

DisconnectedTopology::DisconnectedTopology(std::vector<NodeId> unreachable_nodes)
    : Error("disconnected topology, unreachable: " + join_ids(unreachable_nodes)),
      unreachable(std::move(unreachable_nodes)) {}

// ---- TreeTopology -------------------------------------------------------

std::vector<NodeId> TreeTopology::nodes() const {
  std::vector<NodeId> v;
  v.reserve(neighbors.size());
  for (const auto& kv : neighbors) v.push_back(kv.first);
  return v;
}

const std::vector<NodeId>& TreeTopology::children_of(NodeId n) const {
  static const std::vector<NodeId> none;
  auto it = children.find(n);
  return it == children.end() ? none : it->second;
}

bool TreeTopology::in_range(NodeId a, NodeId b) const {
  auto it = neighbors.find(a);
  return it != neighbors.end() && it->second.count(b) > 0;
}

int TreeTopology::priority(NodeId n) const {
  const auto& sib = children_of(parent.at(n));
  return static_cast<int>(std::find(sib.begin(), sib.end(), n) - sib.begin()) + 1;
}

int TreeTopology::depth(NodeId n) const {
  int d = 0;
  while (n != controller) {
    n = parent.at(n);
    ++d;
  }
  return d;
}

int TreeTopology::max_hops() const {
  int m = 0;
  for (const auto& kv : parent) m = std::max(m, depth(kv.first));
  return m;
}

int TreeTopology::subtree_size(NodeId n) const {
  int s = 1;
  for (NodeId c : children_of(n)) s += subtree_size(c);
  return s;
}

bool TreeTopology::in_subtree(NodeId root, NodeId n) const {
  while (true) {
    if (n == root) return true;
    if (n == controller) return false;
    n = parent.at(n);
  }
}

std::vector<NodeId> TreeTopology::siblings(NodeId n) const {
  std::vector<NodeId> out;
  if (n == controller) return out;
  for (NodeId s : children_of(parent.at(n)))
    if (s != n) out.push_back(s);
  return out;
}

std::vector<NodeId> TreeTopology::bfs_order() const {
  std::vector<NodeId> order;
  std::deque<NodeId> q{controller};
  while (!q.empty()) {
    NodeId n = q.front();
    q.pop_front();
    order.push_back(n);
    for (NodeId c : children_of(n)) q.push_back(c);
  }
  return order;
}

std::vector<NodeId> TreeTopology::parents_in_bfs() const {
  std::vector<NodeId> out;
  for (NodeId n : bfs_order())
    if (!is_leaf(n)) out.push_back(n);
  return out;
}

double TreeTopology::link_distance(NodeId a, NodeId b) const {
  auto ia = positions.find(a);
  auto ib = positions.find(b);
  if (ia == positions.end() || ib == positions.end()) return default_link_distance;
  return std::max(distance(ia->second, ib->second), 0.1);
}

std::vector<NodeId> TreeTopology::uplink_order(NodeId n) const {
  std::vector<NodeId> out{n};
  for (NodeId c : children_of(n)) {
    auto sub = uplink_order(c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

// ---- generation ---------------------------------------------------------

MeshTopology generate_poisson(double mean, double side, std::uint64_t seed,
                              const PoissonOptions& opts) {
  if (mean < 0 || side <= 0) throw ConfigError("poisson: mean must be >= 0 and side > 0");
  Rng rng(seed);
  std::poisson_distribution<int> count(mean);
  std::uniform_real_distribution<double> coord(0.0, side);
  MeshTopology mesh;
  mesh.region_side = side;
  mesh.comm_range = opts.comm_range;
  Point anchor = opts.anchor == ControllerAnchor::Corner ? Point{0, 0} : Point{side / 2, side / 2};
  mesh.positions[kController] = anchor;
  int n = mean > 0 ? count(rng) : 0;
  for (int i = 0; i < n; ++i) {
    double x = coord(rng);
    double y = coord(rng);
    mesh.positions[static_cast<NodeId>(i + 2)] = Point{x, y};
  }
  return mesh;
}

TreeTopology build_tree(const MeshTopology& mesh) {
  TreeTopology t;
  t.controller = mesh.controller;
  t.positions = mesh.positions;
  const Point c = mesh.positions.at(mesh.controller);
  for (const auto& [id, p] : mesh.positions) {
    t.neighbors[id] = mesh.neighbors_of(id);
    t.rank[id] = distance(p, c);
  }
  std::vector<NodeId> unreachable;
  for (const auto& [id, p] : mesh.positions) {
    if (id == t.controller) continue;
    NodeId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (NodeId nb : t.neighbors[id]) {
      double d = t.rank[nb];
      if (d >= t.rank[id] && nb != t.controller) continue;  // rank must strictly decrease
      if (d < best_d || (d == best_d && nb < best)) {
        best = nb;
        best_d = d;
      }
    }
    if (best == 0) {
      unreachable.push_back(id);
      continue;
    }
    t.parent[id] = best;
  }
  if (!unreachable.empty()) throw DisconnectedTopology(unreachable);
  for (const auto& [child, par] : t.parent) t.children[par].push_back(child);
  for (auto& kv : t.children) std::sort(kv.second.begin(), kv.second.end());
  return t;
}

PoissonDraw draw_connected_tree(double mean, double side, std::uint64_t seed,
                                const PoissonOptions& opts, int max_attempts) {
  PoissonDraw out;
  for (int k = 0; k < max_attempts; ++k) {
    auto mesh = generate_poisson(mean, side, derive_seed(seed, 0x7090, static_cast<std::uint64_t>(k)), opts);
    try {
      out.tree = build_tree(mesh);
      return out;
    } catch (const DisconnectedTopology&) {
      ++out.rejected;
    }
  }
  throw Error("draw_connected_tree: no connected draw within attempt budget");
}

// ---- fixed specs --------------------------------------------------------

TreeTopology load_fixed(const FixedSpec& spec) {
  TreeTopology t;
  t.name = spec.name;
  t.controller = spec.controller;
  t.positions = spec.positions;
  t.default_link_distance = spec.default_link_distance;
  std::set<NodeId> ids(spec.nodes.begin(), spec.nodes.end());
  if (ids.size() != spec.nodes.size()) throw InconsistentSpec("duplicate node ids");
  if (!ids.count(spec.controller)) throw InconsistentSpec("controller not in node list");
  for (NodeId n : ids) t.neighbors[n];
  for (const auto& [n, nbs] : spec.neighbors) {
    if (!ids.count(n)) throw InconsistentSpec("neighbor list for unknown node " + std::to_string(n));
    for (NodeId m : nbs) {
      if (!ids.count(m)) throw InconsistentSpec("unknown neighbor " + std::to_string(m));
      if (m == n) throw InconsistentSpec("self loop at " + std::to_string(n));
      t.neighbors[n].insert(m);
    }
  }
  for (const auto& [n, nbs] : t.neighbors)
    for (NodeId m : nbs)
      if (!t.neighbors[m].count(n))
        throw InconsistentSpec("asymmetric adjacency " + std::to_string(n) + "-" + std::to_string(m));
  for (NodeId n : ids) {
    if (n == spec.controller) {
      if (spec.parent.count(n)) throw InconsistentSpec("controller has a parent");
      continue;
    }
    auto it = spec.parent.find(n);
    if (it == spec.parent.end()) throw InconsistentSpec("node " + std::to_string(n) + " has no parent");
    if (!ids.count(it->second)) throw InconsistentSpec("unknown parent of " + std::to_string(n));
    if (!t.neighbors[n].count(it->second))
      throw InconsistentSpec("parent of " + std::to_string(n) + " is not a neighbor");
    t.parent[n] = it->second;
  }
  for (const auto& [child, par] : t.parent) t.children[par].push_back(child);
  for (auto& kv : t.children) std::sort(kv.second.begin(), kv.second.end());
  // cycle check: every node must reach the controller
  for (NodeId n : ids) {
    NodeId cur = n;
    for (std::size_t steps = 0; cur != t.controller; ++steps) {
      if (steps > ids.size()) throw InconsistentSpec("parent map has a cycle through " + std::to_string(n));
      cur = t.parent.at(cur);
    }
    t.rank[n] = t.depth(n);
  }
  return t;
}

using nlohmann::json;

FixedSpec parse_fixed_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InconsistentSpec(std::string("topology spec parse error: ") + e.what());
  }
  if (j.value("format", "") != "gallop-topology") throw InconsistentSpec("not a gallop-topology document");
  if (j.value("version", 0) != 1) throw InconsistentSpec("unsupported topology spec version");
  FixedSpec s;
  try {
    s.name = j.value("name", "");
    s.controller = j.value("controller", kController);
    s.default_link_distance = j.value("default_link_distance", 15.0);
    s.nodes = j.at("nodes").get<std::vector<NodeId>>();
    for (const auto& [k, v] : j.at("parent").items()) s.parent[static_cast<NodeId>(std::stoul(k))] = v.get<NodeId>();
    for (const auto& [k, v] : j.at("neighbors").items()) {
      auto lst = v.get<std::vector<NodeId>>();
      s.neighbors[static_cast<NodeId>(std::stoul(k))] = std::set<NodeId>(lst.begin(), lst.end());
    }
    if (j.contains("positions"))
      for (const auto& [k, v] : j["positions"].items())
        s.positions[static_cast<NodeId>(std::stoul(k))] = Point{v.at(0).get<double>(), v.at(1).get<double>()};
  } catch (const json::exception& e) {
    throw InconsistentSpec(std::string("topology spec field error: ") + e.what());
  }
  return s;
}

std::string serialize_fixed_spec(const FixedSpec& s) {
  json j;
  j["format"] = "gallop-topology";
  j["version"] = 1;
  j["name"] = s.name;
  j["controller"] = s.controller;
  j["default_link_distance"] = s.default_link_distance;
  j["nodes"] = s.nodes;
  json par = json::object();
  for (const auto& [k, v] : s.parent) par[std::to_string(k)] = v;
  j["parent"] = par;
  json nb = json::object();
  for (const auto& [k, v] : s.neighbors) nb[std::to_string(k)] = std::vector<NodeId>(v.begin(), v.end());
  j["neighbors"] = nb;
  if (!s.positions.empty()) {
    json pos = json::object();
    for (const auto& [k, p] : s.positions) {
      double rx = std::round(p.x * 1000.0) / 1000.0;
      double ry = std::round(p.y * 1000.0) / 1000.0;
      pos[std::to_string(k)] = {rx, ry};
    }
    j["positions"] = pos;
  }
  return j.dump(2) + "\n";
}

FixedSpec spec_from_tree(const TreeTopology& t) {
  FixedSpec s;
  s.name = t.name;
  s.controller = t.controller;
  s.nodes = t.nodes();
  s.parent = t.parent;
  s.neighbors = t.neighbors;
  s.positions = t.positions;
  s.default_link_distance = t.default_link_distance;
  return s;
}

TreeTopology load_fixed_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open topology file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_fixed(parse_fixed_spec(ss.str()));
}

// ---- bundled shapes -----------------------------------------------------

namespace {

TreeTopology from_positions(const std::string& name, const std::map<NodeId, Point>& pos, double range) {
  MeshTopology m;
  m.positions = pos;
  m.comm_range = range;
  auto t = build_tree(m);
  t.name = name;
  return t;
}

// Grid with deterministic jitter; controller at the origin corner.
TreeTopology grid_shape(const std::string& name, int cols, int rows, int count, double spacing, double range,
                        std::uint64_t salt) {
  std::map<NodeId, Point> pos;
  pos[kController] = {0, 0};
  NodeId id = 2;
  for (int r = 0; r < rows && static_cast<int>(id) < count + 2; ++r)
    for (int c = 0; c < cols && static_cast<int>(id) < count + 2; ++c) {
      double jx = (unit_open(hash_words({salt, id, 1})) - 0.5) * 0.3 * spacing;
      double jy = (unit_open(hash_words({salt, id, 2})) - 0.5) * 0.3 * spacing;
      pos[id++] = {(c + 0.6) * spacing + jx, (r + 0.6) * spacing + jy};
    }
  return from_positions(name, pos, range);
}

}  // namespace

TreeTopology bundled_topology(const std::string& name) {
  if (name == "fig2" || name == "fig4") {
    return from_positions(name, {{1, {0, 0}}, {2, {25, 0}}, {3, {0, 25}}, {4, {45, -10}}, {5, {-20, 40}}, {6, {45, 10}}},
                          30.0);
  }
  if (name == "fig8") {
    return from_positions(name,
                          {{1, {0, 0}}, {2, {25, 0}}, {3, {0, 25}}, {4, {12, -18}}, {5, {-20, 40}}, {6, {45, 10}},
                           {7, {45, -10}}},
                          30.0);
  }
  if (name == "fig6") {
    return from_positions(name, {{1, {0, 0}}, {2, {10, 0}}, {3, {0, 10}}, {4, {-10, 0}}, {5, {0, -10}}}, 30.0);
  }
  if (name == "topology-a") return grid_shape(name, 5, 5, 25, 12.0, 30.0, 0xa11);
  if (name == "topology-b") return grid_shape(name, 10, 6, 59, 11.0, 30.0, 0xb22);
  throw ConfigError("unknown bundled topology: " + name);
}

std::vector<std::string> bundled_topology_names() {
  return {"fig2", "fig4", "fig6", "fig8", "topology-a", "topology-b"};
}

TreeTopology star_topology(int k, double radius, double comm_range) {
  std::map<NodeId, Point> pos;
  pos[kController] = {0, 0};
  const double pi = std::acos(-1.0);
  for (int i = 0; i < k; ++i) {
    double a = 2 * pi * i / std::max(k, 1);
    pos[static_cast<NodeId>(i + 2)] = {radius * std::cos(a), radius * std::sin(a)};
  }
  auto t = from_positions("star", pos, comm_range);
  for (const auto& kv : t.parent)
    if (kv.second != kController) throw InconsistentSpec("star: leaf outside controller range");
  return t;
}

TreeTopology random_star(int k, double r_p, std::uint64_t seed, double comm_range) {
  if (comm_range <= 0) comm_range = r_p;
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pi = std::acos(-1.0);
  std::map<NodeId, Point> pos;
  pos[kController] = {0, 0};
  for (int i = 0; i < k; ++i) {
    double r = r_p * std::sqrt(u(rng));
    double a = 2 * pi * u(rng);
    pos[static_cast<NodeId>(i + 2)] = {r * std::cos(a), r * std::sin(a)};
  }
  MeshTopology m;
  m.positions = pos;
  m.comm_range = std::max(comm_range, r_p);
  auto t = build_tree(m);
  // force a single-hop star: every leaf under the controller, sibling adjacency kept
  t.parent.clear();
  t.children.clear();
  for (const auto& kv : pos)
    if (kv.first != kController) {
      t.parent[kv.first] = kController;
      t.children[kController].push_back(kv.first);
      t.neighbors[kController].insert(kv.first);
      t.neighbors[kv.first].insert(kController);
    }
  t.name = "random-star";
  return t;
}

}  // namespace gallop
