#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "gallop/types.hpp"

namespace gallop {

// Raw signaling slot index s0, s1, ...
using SigSlot = int;

enum class SlotClass { ControllerDls, Rfs, Asgn, Dls };

SlotClass classify_slot(SigSlot raw);
std::string to_string(SlotClass c);

// RFS slots s1, s4, s7, ... have ordinals 1, 2, 3, ...
int rfs_ordinal(SigSlot raw);
SigSlot rfs_slot(int ordinal);
// First RFS slot strictly after raw.
SigSlot next_rfs_after(SigSlot raw);
// DLS slots s3, s6, ... have ordinals 1, 2, ...; s0 is ordinal 0.
int dls_ordinal(SigSlot raw);
SigSlot dls_slot(int ordinal);
SigSlot next_dls_after(SigSlot raw);

SigSlot child_rfs_slot(SigSlot ix_rfs, int priority);
SigSlot allocation_window_end(SigSlot ix_rfs, int theta);
SigSlot sr1_retx_slot(SigSlot ix_rfs, int theta, int priority, int u);
SigSlot sr2_retx_slot(SigSlot ix_prev_rfs, int priority, int backoff);

struct DlsKnowledge {
  std::set<SigSlot> occupied;  // DLS slots known to be used by in-range nodes
  SigSlot horizon = 10000;
};

// attempt 1: earliest free DLS slot after `now`; attempt >= 2: DLS ordinal ix_prev + B - 1.
SigSlot sr3_dls_retx_slot(const DlsKnowledge& lk, SigSlot now, SigSlot ix_prev_dls, int backoff, int attempt);

// Two-slot frame of the retransmission-scheduling phase: s0, s2, ... RFS; s1, s3, ... ASGN.
inline bool retx_is_rfs_slot(SigSlot raw) { return raw % 2 == 0; }

// ---- messages -----------------------------------------------------------

enum class MsgKind { Dls, RfsD, RfsU, Asgn, RfsRs, GNack, Terminate, EmptyRfs, EmptyAsgn, NtReport, RtBroadcast, Announce };

std::string to_string(MsgKind k);

struct Occupancy {
  FrameKind frame = FrameKind::Uplink;
  DataSlot slot = 0;
  NodeId tx = 0;
  NodeId rx = 0;  // 0 = broadcast neighbourhood
  bool operator<(const Occupancy& o) const {
    return std::tie(frame, slot, tx, rx) < std::tie(o.frame, o.slot, o.tx, o.rx);
  }
  bool operator==(const Occupancy& o) const = default;
};

struct DlsPayload {
  std::vector<NodeId> child_priority;
  SigSlot ix_rfs = -1;
  std::vector<DataSlot> own_downlink;
  std::vector<std::vector<NodeId>> groups;  // receivers of each own_downlink slot
  int allocated_children = 0;
  bool retransmission = false;
};

struct RfsPayload {
  FrameKind frame = FrameKind::Uplink;
  std::vector<DataSlot> slots;
  DataSlot lower_bound = 0;
  std::vector<DataSlot> known_busy;  // requester-side occupied slots on the frame
  // RFS-U only: allocations of the requester's subtree, reported upwards for the audit.
  std::map<NodeId, std::vector<DataSlot>> table_dl;
  std::map<NodeId, std::vector<DataSlot>> table_ul;
};

struct AsgnPayload {
  FrameKind frame = FrameKind::Uplink;
  std::vector<DataSlot> slots;
  NodeId relay = 0;  // retransmission scheduling: cooperating relay, 0 = none
};

struct GNackEntry {
  NodeId child = 0;
  int ordinal = 0;        // 1-based position in the issuer's expected reception order
  int original_slot = -1; // extrapolation mode only
  bool operator==(const GNackEntry& o) const = default;
};

struct GNackPayload {
  std::vector<GNackEntry> entries;
};

struct EmptyPayload {};

using MessagePayload = std::variant<EmptyPayload, DlsPayload, RfsPayload, AsgnPayload, GNackPayload>;

struct SignalingMessage {
  MsgKind kind = MsgKind::Dls;
  NodeId sender = 0;
  std::vector<NodeId> addressees;
  MessagePayload payload;
  // Committed allocations of the sender, piggybacked for neighbours' local knowledge.
  std::vector<Occupancy> announce;
};

}  // namespace gallop
