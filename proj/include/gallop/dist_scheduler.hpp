#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gallop/channel.hpp"
#include "gallop/schedule.hpp"
#include "gallop/signaling.hpp"
#include "gallop/topology.hpp"

namespace gallop {

struct NonConvergence : Error {
  explicit NonConvergence(int horizon)
      : Error("signaling did not converge within " + std::to_string(horizon) + " slots"), max_slots(horizon) {}
  int max_slots;
};

struct ProtocolViolation : Error {
  using Error::Error;
};

struct SignalingParams {
  DownlinkMode dl_mode = DownlinkMode::Broadcast;
  // Groups mode: receivers per downlink slot for each listed parent (others fall back to distinct).
  std::map<NodeId, std::vector<std::vector<NodeId>>> dl_groups;
  int psi = 4;
  int horizon = 10000;
  // Piggyback the sender's committed allocations on every signaling message.
  bool piggyback = true;
  // After a commit, the child re-announces its allocation in the next free DLS slot.
  bool announce_commits = false;
  int announce_repeats = 1;
  // Overheard RFS proposals count as occupied.
  bool record_proposals = true;
  Channel w_s = 2;
  Channel w_d = 0;
  Channel w_u = 1;
  long abs_offset = 0;  // absolute slot of s0 on the radio clock
  bool record_trace = true;
  // Controller checks the reported global table before TERMINATE and repairs conflicts;
  // corrections ride on the TERMINATE flood.
  bool audit = true;
};

std::vector<std::vector<NodeId>> downlink_groups(const TreeTopology& tree, NodeId parent,
                                                 const SignalingParams& p);

class LocalKnowledge {
 public:
  void occupy(FrameKind f, DataSlot t, NodeId owner, bool transmits = true);
  void occupy(const Occupancy& o);
  // Free for a requester when no owner outside `allowed` is recorded.
  bool free_for(FrameKind f, DataSlot t, const std::set<NodeId>& allowed) const;
  std::vector<DataSlot> earliest_free(FrameKind f, int n, DataSlot lb, const std::set<NodeId>& allowed,
                                      const std::set<DataSlot>& extra_blocked = {}) const;
  std::vector<DataSlot> busy_slots(FrameKind f, const std::set<NodeId>& allowed) const;
  // Nodes recorded as transmitting / receiving in slot t.
  std::set<NodeId> transmitters(FrameKind f, DataSlot t) const;
  std::set<NodeId> receivers(FrameKind f, DataSlot t) const;
  std::set<DataSlot> recorded_slots(FrameKind f) const;
  // Records touching any node accepted by `keep`, as transmit (rx = 0) or receive (tx = 0) entries.
  template <class Pred>
  std::vector<Occupancy> export_records(Pred keep) const {
    std::vector<Occupancy> out;
    for (const auto& [key, nodes] : tx_)
      for (NodeId n : nodes)
        if (keep(n)) out.push_back({key.first, key.second, n, 0});
    for (const auto& [key, nodes] : rx_)
      for (NodeId n : nodes)
        if (keep(n)) out.push_back({key.first, key.second, 0, n});
    return out;
  }

  std::set<int> rfs_reserved;  // RFS ordinals claimed by overheard family blocks
  std::set<SigSlot> dls_planned;
  std::map<NodeId, int> allocated_children;

 private:
  std::map<std::pair<FrameKind, DataSlot>, std::set<NodeId>> occupied_;
  std::map<std::pair<FrameKind, DataSlot>, std::set<NodeId>> tx_;
  std::map<std::pair<FrameKind, DataSlot>, std::set<NodeId>> rx_;
};

struct TraceEvent {
  SigSlot slot = 0;
  Channel channel = 0;
  NodeId sender = 0;
  MsgKind kind = MsgKind::Dls;
  std::string outcome;  // per addressee: id:ok / id:lost
  std::string detail;
};

std::string format_trace_line(const TraceEvent& e);
std::optional<TraceEvent> parse_trace_line(const std::string& line);

struct SignalingResult {
  Schedule schedule;
  int convergence_slots = 0;
  SigSlot terminate_slot = -1;
  std::vector<TraceEvent> trace;
  int messages_sent = 0;
  int conflicts_found = 0;  // audit: conflicts in the table reported to the controller
  int repaired_moves = 0;   // audit: transmissions shifted by the repair
};

class NodeAgent;

// Runs the signaling phase to termination over the radio environment.
SignalingResult run_signaling(const TreeTopology& tree, RadioEnvironment& radio, const SignalingParams& params,
                              std::uint64_t seed);

// Node-level event interface (used by the driver, exposed for unit tests).
class NodeAgent {
 public:
  NodeAgent(NodeId id, const TreeTopology& tree, const SignalingParams& params, std::uint64_t seed);
  std::optional<SignalingMessage> transmit(SigSlot s);
  void on_receive(const SignalingMessage& m, SigSlot s);
  void on_slot_end(SigSlot s);

  NodeId id() const { return id_; }
  bool done() const;
  bool terminated() const { return terminate_sent_; }
  SigSlot terminate_slot() const { return terminate_slot_; }
  const LocalKnowledge& knowledge() const { return lk_; }
  const std::vector<DataSlot>& dl_alloc() const { return dl_alloc_; }
  const std::vector<DataSlot>& ul_alloc() const { return ul_alloc_; }
  const std::map<NodeId, std::vector<DataSlot>>& child_ul() const { return child_ul_; }
  const std::map<NodeId, std::vector<DataSlot>>& child_dl() const { return child_dl_; }
  // Allocation table of this node's subtree as known from RFS-U reports.
  Schedule subtree_table() const;
  // Controller: audited schedule and repair statistics, valid once terminated.
  const std::optional<RepairResult>& audit() const { return audit_; }
  int audit_conflicts() const { return audit_conflicts_; }
  std::vector<std::string> log;  // ProtocolViolation notes

 private:
  enum class Phase { NeedDls, DlRequest, Family, UlRequest, Done };
  struct Request {
    MsgKind kind = MsgKind::RfsU;
    FrameKind frame = FrameKind::Uplink;
    int n = 1;
    DataSlot lb = 0;
    SigSlot next_tx = -1;
    SigSlot last_tx = -1;
    int attempts = 0;
    bool family_slot = true;  // first attempt used the family RFS slot
    bool sr1_planned = false;
    bool awaiting = false;
  };

  bool is_controller() const { return id_ == tree_.controller; }
  std::set<NodeId> self() const { return {id_}; }
  void start_request(MsgKind kind, SigSlot now);
  void plan_retry(SigSlot now);
  SigSlot next_free_rfs(SigSlot after) const;
  void start_family(SigSlot now);
  void grant(NodeId child, const RfsPayload& req, MsgKind kind, SigSlot s);
  void plan_dls_retx(SigSlot now, int attempt);
  SignalingMessage base_message(MsgKind k) const;
  std::vector<Occupancy> committed() const;
  void learn(const SignalingMessage& m);
  void record(FrameKind f, NodeId x, const std::vector<DataSlot>& slots);
  void plan_announce(SigSlot after);
  int backoff();
  // Receivers of transmitter x: group i of its downlink slots, or its parent on the uplink.
  std::vector<NodeId> receivers_of(NodeId x, FrameKind f, std::size_t i) const;
  // No recorded activity makes x -> rx at t collide with a known transmission.
  bool compatible(FrameKind f, DataSlot t, NodeId x, const std::vector<NodeId>& rx) const;
  // Grant check at a parent: compatible and no recorded transmitter in range of this node.
  bool grantable(FrameKind f, DataSlot t, NodeId child, const std::vector<NodeId>& rx) const;
  std::vector<DataSlot> propose(FrameKind f, int n, DataSlot lb) const;

  NodeId id_;
  const TreeTopology& tree_;
  const SignalingParams& p_;
  Rng rng_;
  LocalKnowledge lk_;
  Phase phase_ = Phase::NeedDls;

  // child side
  bool got_dls_ = false;
  SigSlot parent_ix_ = -1;
  int parent_theta_ = 0;
  int parent_u_ = 0;
  std::vector<DataSlot> parent_dl_;
  std::vector<std::vector<NodeId>> parent_groups_;
  Request req_;
  std::vector<DataSlot> dl_alloc_;
  std::vector<DataSlot> ul_alloc_;
  std::set<SigSlot> announce_at_;

  // parent side
  std::vector<NodeId> children_;
  std::vector<std::vector<NodeId>> groups_;
  bool family_started_ = false;
  SigSlot dls_first_ = -1;
  SigSlot ix_ = -1;
  SigSlot window_end_ = -1;
  std::set<NodeId> heard_;
  std::map<NodeId, std::vector<DataSlot>> child_dl_;
  std::map<NodeId, std::vector<DataSlot>> child_ul_;
  std::map<NodeId, std::set<DataSlot>> child_busy_;
  std::set<SigSlot> dls_tx_;  // planned DLS transmissions
  SigSlot last_dls_ = -1;
  int dls_retx_ = 0;
  bool window_retx_done_ = false;
  SigSlot followup_deadline_ = -1;
  std::map<SigSlot, SignalingMessage> asgn_out_;
  SigSlot terminate_slot_ = -1;
  bool terminate_sent_ = false;
  std::map<NodeId, std::vector<DataSlot>> table_dl_;
  std::map<NodeId, std::vector<DataSlot>> table_ul_;
  std::optional<RepairResult> audit_;
  int audit_conflicts_ = 0;
  void run_audit();
};

}  // namespace gallop
