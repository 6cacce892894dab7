#pragma once

#include <map>
#include <string>
#include <vector>

#include "gallop/topology.hpp"
#include "gallop/types.hpp"

namespace gallop {

enum class PayloadKind { Command, Response, Control };

struct Payload {
  PayloadKind kind = PayloadKind::Response;
  NodeId origin = 0;  // Response: node whose packet is carried; Command: 0
  bool operator==(const Payload& o) const = default;
};

struct Transmission {
  DataSlot slot = 0;
  Channel channel = 0;
  std::vector<NodeId> senders;    // more than one sender = cooperative transmission
  std::vector<NodeId> receivers;  // intended receivers
  Payload payload;
};

struct Frame {
  FrameKind kind = FrameKind::Uplink;
  int length = 0;  // slots occupied, last slot index + 1 at least
  std::vector<Transmission> transmissions;
};

enum class DownlinkMode { Broadcast, Distinct, Groups };

// Protocol-level result of schedule construction.
struct Schedule {
  DownlinkMode dl_mode = DownlinkMode::Broadcast;
  Channel w_d = 0;
  Channel w_u = 1;
  // Parent -> its downlink slots; dl_groups[parent][i] are the receivers of dl_slots[parent][i].
  std::map<NodeId, std::vector<DataSlot>> dl_slots;
  std::map<NodeId, std::vector<std::vector<NodeId>>> dl_groups;
  // Node -> its uplink slots, ascending. Slot i carries uplink_order(node)[i].
  std::map<NodeId, std::vector<DataSlot>> ul_slots;

  Frame downlink_frame() const;
  Frame uplink_frame(const TreeTopology& tree) const;
  int dl_span() const;
  int ul_span() const;
  bool empty() const { return dl_slots.empty() && ul_slots.empty(); }
  // Slot at which node n receives the command from its parent, -1 if none.
  DataSlot dl_reception_slot(NodeId n) const;
};

enum class ConflictKind {
  ReceiverCollision,  // a receiver hears a second, non-cooperative in-range transmitter
  HalfDuplex,         // node transmits and receives in the same slot
  DoubleBooking,      // node in two transmissions of the same role in one slot
  MultiChannel,       // node active on two channels in one slot
  OutOfRange,         // intended receiver not in range of any sender
  Ordering            // sequencing violation (downlink parent-first, uplink child-first)
};

std::string to_string(ConflictKind k);

struct Conflict {
  ConflictKind kind = ConflictKind::ReceiverCollision;
  FrameKind frame = FrameKind::Uplink;
  DataSlot slot = 0;
  NodeId a = 0;
  NodeId b = 0;
  std::string detail;
};

// Structural conflicts of one frame; transmissions with several senders are cooperative
// and never conflict internally.
std::vector<Conflict> verify_frame(const Frame& frame, const TreeTopology& tree);
// Conflicts of downlink and uplink frames of a schedule.
std::vector<Conflict> verify_schedule(const Schedule& s, const TreeTopology& tree);
std::vector<Conflict> verify_frames(const std::vector<Frame>& frames, const TreeTopology& tree);
// Sequencing: parent downlink before children's; uplink forwarding after reception; UL-2 counts.
std::vector<Conflict> verify_ordering(const Schedule& s, const TreeTopology& tree);

struct RepairResult {
  Schedule schedule;
  int moved = 0;  // transmissions shifted to a later slot
};

// Walks each frame in slot order and shifts every transmission that conflicts with an
// already placed one (or would break sequencing) to its earliest feasible later slot.
// A conflict-free schedule is returned unchanged.
RepairResult repair_schedule(const Schedule& s, const TreeTopology& tree);

int cycle_time(const Schedule& s);
double slots_to_ms(double slots, double slot_us = kSlotUs);

}  // namespace gallop
