#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gallop/topology.hpp"

using namespace gallop;

namespace {

void check_tree_invariants(const TreeTopology& t) {
  std::size_t edges = 0;
  for (const auto& [c, p] : t.parent) {
    ++edges;
    CHECK(t.neighbors.at(c).count(p));
    CHECK(t.neighbors.at(p).count(c));
    CHECK(t.rank.at(c) > t.rank.at(p));
    // no cycles: walking up ends at the controller
    NodeId n = c;
    int steps = 0;
    while (n != t.controller && steps < 1000) {
      n = t.parent.at(n);
      ++steps;
    }
    CHECK(n == t.controller);
  }
  CHECK(edges + 1 == t.size());
  for (NodeId n : t.nodes()) {
    const auto& ch = t.children_of(n);
    CHECK(std::is_sorted(ch.begin(), ch.end()));
    if (!t.positions.empty())
      for (NodeId m : t.neighbors.at(n))
        CHECK(distance(t.positions.at(n), t.positions.at(m)) < 30.0 + 1e-9);
  }
}

}  // namespace

TEST_CASE("fig4 network matches the neighbourhood listing") {
  auto t = bundled_topology("fig4");
  CHECK(t.children_of(1) == std::vector<NodeId>{2, 3});
  CHECK(t.children_of(2) == std::vector<NodeId>{4, 6});
  CHECK(t.children_of(3) == std::vector<NodeId>{5});
  CHECK(t.neighbors.at(1) == std::set<NodeId>{2, 3});
  CHECK(t.neighbors.at(4) == std::set<NodeId>{2, 6});
  CHECK(!t.in_range(2, 3));
  CHECK(!t.in_range(2, 5));
  CHECK(!t.in_range(3, 4));
  CHECK(t.priority(6) == 2);
  CHECK(t.depth(5) == 2);
  CHECK(t.max_hops() == 2);
  CHECK(t.uplink_order(2) == std::vector<NodeId>{2, 4, 6});
  check_tree_invariants(t);
}

TEST_CASE("fig8 network adds node 4 under the controller and node 7 under node 2") {
  auto t = bundled_topology("fig8");
  CHECK(t.children_of(1) == std::vector<NodeId>{2, 3, 4});
  CHECK(t.children_of(2) == std::vector<NodeId>{6, 7});
  CHECK(t.neighbors.at(4) == std::set<NodeId>{1, 2});
  check_tree_invariants(t);
}

TEST_CASE("empty Poisson draw is controller-only") {
  auto m = generate_poisson(0.0, 60.0, 5);
  CHECK(m.positions.size() == 1);
  auto t = build_tree(m);
  CHECK(t.size() == 1);
  CHECK(t.is_leaf(t.controller));
}

TEST_CASE("Poisson draws are deterministic and inside the region") {
  auto a = generate_poisson(20, 60, 99);
  auto b = generate_poisson(20, 60, 99);
  REQUIRE(a.positions.size() == b.positions.size());
  for (const auto& [n, p] : a.positions) {
    CHECK(p.x == b.positions.at(n).x);
    CHECK(p.y == b.positions.at(n).y);
    CHECK(p.x >= 0);
    CHECK(p.x <= 60);
    CHECK(p.y >= 0);
    CHECK(p.y <= 60);
  }
  CHECK(a.positions.at(kController).x == 0.0);
}

TEST_CASE("Poisson node count mean over 1000 seeds") {
  double total = 0;
  for (int s = 0; s < 1000; ++s) total += static_cast<double>(generate_poisson(50, 80, 7000 + s).positions.size() - 1);
  double mean = total / 1000;
  CHECK(mean >= 48);
  CHECK(mean <= 52);
}

TEST_CASE("Scenario A trees have 2 to 6 hops") {
  int lo = 100, hi = 0;
  for (int s = 0; s < 1000; ++s) {
    auto d = draw_connected_tree(20, 60, 100 + s);
    int h = d.tree.max_hops();
    if (d.tree.size() < 8) continue;  // tiny draws can stay within one hop
    lo = std::min(lo, h);
    hi = std::max(hi, h);
    if (s < 50) check_tree_invariants(d.tree);
  }
  CHECK(lo >= 2);
  CHECK(hi <= 6);
}

TEST_CASE("build_tree picks the in-range neighbour closest to the controller") {
  MeshTopology m;
  m.comm_range = 30;
  m.positions = {{1, {0, 0}}, {2, {20, 0}}, {3, {0, 20}}, {4, {35, 10}}};
  auto t = build_tree(m);
  CHECK(t.parent.at(2) == 1);
  CHECK(t.parent.at(4) == 2);  // node 3 is out of range of node 4
  MeshTopology single;
  single.positions = {{1, {0, 0}}, {2, {5, 0}}};
  auto s = build_tree(single);
  CHECK(s.children_of(1) == std::vector<NodeId>{2});
  CHECK(s.is_leaf(2));
}

TEST_CASE("disconnected mesh reports unreachable nodes") {
  MeshTopology m;
  m.comm_range = 10;
  m.positions = {{1, {0, 0}}, {2, {5, 0}}, {3, {50, 50}}};
  try {
    build_tree(m);
    FAIL("expected DisconnectedTopology");
  } catch (const DisconnectedTopology& e) {
    CHECK(e.unreachable == std::vector<NodeId>{3});
  }
}

TEST_CASE("fixed spec round trip and validation") {
  auto t = bundled_topology("fig4");
  auto text = serialize_fixed_spec(spec_from_tree(t));
  auto back = load_fixed(parse_fixed_spec(text));
  CHECK(back.parent == t.parent);
  CHECK(back.neighbors == t.neighbors);
  CHECK(back.children == t.children);

  FixedSpec bad;
  bad.nodes = {1, 2, 3};
  bad.parent = {{2, 1}, {3, 1}};
  bad.neighbors = {{1, {2}}, {2, {1}}, {3, {}}};
  CHECK_THROWS_AS(load_fixed(bad), InconsistentSpec);
  CHECK_THROWS_AS(parse_fixed_spec("{not json"), InconsistentSpec);

  FixedSpec two;
  two.nodes = {1, 2};
  two.parent = {{2, 1}};
  two.neighbors = {{1, {2}}, {2, {1}}};
  auto tt = load_fixed(two);
  CHECK(tt.is_leaf(2));
  CHECK(tt.children_of(1) == std::vector<NodeId>{2});
}

TEST_CASE("bundled shapes") {
  for (const auto& n : bundled_topology_names()) check_tree_invariants(bundled_topology(n));
  auto a = bundled_topology("topology-a");
  CHECK(a.size() == 26);
  CHECK(a.max_hops() <= 4);
  auto b = bundled_topology("topology-b");
  CHECK(b.size() == 60);
  CHECK(b.max_hops() <= 6);
  CHECK_THROWS_AS(bundled_topology("nope"), ConfigError);
}

TEST_CASE("stars") {
  auto s = star_topology(7);
  CHECK(s.children_of(1).size() == 7);
  auto r = random_star(12, 30, 5);
  CHECK(r.children_of(1).size() == 12);
}
