#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gallop/channel.hpp"
#include "gallop/retransmission.hpp"
#include "gallop/schedule.hpp"

namespace gallop {

struct EngineParams {
  RetxTechnique technique = RetxTechnique::None;
  int dup_rounds = 1;    // duplication: extra rounds
  int retx_rounds = 1;   // retransmission phases per cycle (scheduling, extrapolation)
  RetxParams retx;
  ChannelPlan channels;
  bool lossy_gnack = false;  // G-NACKs go over the radio instead of being assumed delivered
  // Phase numbering for hopping: phase k of this cycle is cycle_no * kPhasesPerCycle + k.
  long cycle_no = 0;
};

inline constexpr long kPhasesPerCycle = 64;

struct CycleOutcome {
  int delivered = 0;  // distinct uplink packets at the controller
  int expected = 0;   // one per non-controller node
  int base_slots = 0;
  int retx_slots = 0;
  int retx_phases = 0;
  ReceptionRecord record;
  std::vector<RetxPlan> plans;
  std::vector<std::string> trace;
  int total_slots() const { return base_slots + retx_slots; }
  double pdr() const { return expected ? 100.0 * delivered / expected : 0.0; }
};

// Executes data frames over the radio and tracks who holds what.
class DataPlane {
 public:
  DataPlane(const TreeTopology& tree, RadioEnvironment& radio, const RelayTable& relays);

  // Runs one frame whose slot 0 is at abs slot `abs`. With `gated`, relay co-senders only
  // transmit after a handoff for that payload reached them.
  // `plan` maps role channels to physical ones for the given phase number.
  void run_frame(const Frame& f, long abs, bool gated, ReceptionRecord& rec, const ChannelPlan& plan = {},
                 long phase = 0);
  void run_plan(const FramePlan& p, long abs, ReceptionRecord& rec, const ChannelPlan& plan = {}, long phase = 0);

  // One transmission cycle with the configured technique; base cycle starts at `abs`.
  CycleOutcome run_cycle(const Schedule& s, const EngineParams& p, long abs);

  static ReceptionRecord fresh_record(const TreeTopology& tree);

 private:
  // Drops G-NACK entries whose addressee missed the issuer's G-NACK broadcast.
  std::vector<GNack> deliver_gnacks(const std::vector<GNack>& g, const Schedule& s, long abs, Channel ch);

  const TreeTopology& tree_;
  RadioEnvironment& radio_;
  const RelayTable& relays_;
  std::set<std::pair<NodeId, NodeId>> armed_;  // (relay, origin) handoffs received
};

}  // namespace gallop
