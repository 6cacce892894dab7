#pragma once

#include <map>
#include <vector>

#include "gallop/schedule.hpp"
#include "gallop/topology.hpp"

namespace gallop {

// Global-knowledge sequential schedule: BFS-ordered downlink where a node starts after its parent
// finished, leaf-up uplink with own packet first; first-fit parallelization throughout.
Schedule schedule_centralized(const TreeTopology& tree, DownlinkMode mode);

enum class LqfTraffic {
  Uplink,     // one queue per node toward its parent
  ClosedLoop,  // uplink queues plus one downlink queue per parent (commands)
  Downlink     // commands only (dynamic queues)
};

enum class LqfQueues {
  Static,  // every queue holds its full packet count from slot 0
  Dynamic  // packets join a queue when received; command delivery gates responses
};

struct LqfResult {
  Schedule schedule;
  Frame frame;  // all transmissions on one channel, the form checked for conflicts
  int duration_slots = 0;
};

// Uplink packet counts implied by the tree: own packet plus one per descendant.
std::map<NodeId, int> uplink_queues(const TreeTopology& tree);

// Longest-queue-first greedy maximal scheduling. The map overload uses static queues.
LqfResult schedule_lqf(const TreeTopology& tree, const std::map<NodeId, int>& queue_lengths);
LqfResult schedule_lqf(const TreeTopology& tree, LqfTraffic traffic = LqfTraffic::ClosedLoop,
                       DownlinkMode mode = DownlinkMode::Broadcast, LqfQueues queues = LqfQueues::Dynamic);

}  // namespace gallop
