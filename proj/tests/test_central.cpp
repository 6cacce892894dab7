#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gallop/central_scheduler.hpp"

using namespace gallop;

TEST_CASE("fig2 centralized cycle times") {
  auto tree = bundled_topology("fig2");
  auto uni = schedule_centralized(tree, DownlinkMode::Distinct);
  CHECK(uni.dl_span() == 4);
  CHECK(uni.ul_span() == 6);
  CHECK(cycle_time(uni) == 10);
  CHECK(verify_schedule(uni, tree).empty());
  CHECK(verify_ordering(uni, tree).empty());
  auto bc = schedule_centralized(tree, DownlinkMode::Broadcast);
  CHECK(bc.dl_span() == 3);
  CHECK(cycle_time(bc) == 9);
  CHECK(verify_schedule(bc, tree).empty());
  CHECK(verify_ordering(bc, tree).empty());
}

TEST_CASE("distinct star takes 2K slots") {
  for (int k : {1, 2, 5, 12}) {
    auto tree = star_topology(k);
    auto s = schedule_centralized(tree, DownlinkMode::Distinct);
    CHECK(cycle_time(s) == 2 * k);
  }
  CHECK(cycle_time(schedule_centralized(star_topology(0), DownlinkMode::Distinct)) == 0);
}

TEST_CASE("lqf on a single link drains its queue") {
  auto tree = star_topology(1);
  auto r = schedule_lqf(tree, std::map<NodeId, int>{{2, 3}});
  CHECK(r.duration_slots == 3);
  CHECK(verify_frame(r.frame, tree).empty());
}

TEST_CASE("lqf on fig4 is bounded by the largest queue and the distributed cycle") {
  auto tree = bundled_topology("fig4");
  auto q = uplink_queues(tree);
  CHECK(q.at(2) == 3);
  CHECK(q.at(3) == 2);
  CHECK(q.at(4) == 1);
  auto ul = schedule_lqf(tree, q);
  CHECK(ul.duration_slots >= 3);
  CHECK(ul.duration_slots <= 9);
  CHECK(verify_frame(ul.frame, tree).empty());
  auto cl = schedule_lqf(tree, LqfTraffic::ClosedLoop);
  CHECK(cl.duration_slots >= ul.duration_slots);
  CHECK(cl.duration_slots <= 9);
  CHECK(verify_frame(cl.frame, tree).empty());
}

TEST_CASE("random topologies: both baselines are conflict free") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto tree = draw_connected_tree(20, 60, seed).tree;
    for (auto mode : {DownlinkMode::Broadcast, DownlinkMode::Distinct}) {
      auto s = schedule_centralized(tree, mode);
      CHECK(verify_schedule(s, tree).empty());
      CHECK(verify_ordering(s, tree).empty());
    }
    auto l = schedule_lqf(tree);
    CHECK(verify_frame(l.frame, tree).empty());
    int total = 0;
    for (auto& [n, q] : uplink_queues(tree)) total += q;
    int ul_tx = 0;
    for (auto& [n, v] : l.schedule.ul_slots) ul_tx += static_cast<int>(v.size());
    CHECK(ul_tx == total);
  }
}
