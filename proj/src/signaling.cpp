#include "gallop/signaling.hpp"

namespace gallop {

SlotClass classify_slot(SigSlot raw) {
  if (raw < 0) throw std::invalid_argument("classify_slot: negative slot");
  if (raw == 0) return SlotClass::ControllerDls;
  switch (raw % 3) {
    case 1: return SlotClass::Rfs;
    case 2: return SlotClass::Asgn;
    default: return SlotClass::Dls;
  }
}

std::string to_string(SlotClass c) {
  switch (c) {
    case SlotClass::ControllerDls: return "CDLS";
    case SlotClass::Rfs: return "RFS";
    case SlotClass::Asgn: return "ASGN";
    case SlotClass::Dls: return "DLS";
  }
  return "?";
}

int rfs_ordinal(SigSlot raw) {
  if (classify_slot(raw) != SlotClass::Rfs) throw std::invalid_argument("rfs_ordinal: not an RFS slot");
  return (raw - 1) / 3 + 1;
}

SigSlot rfs_slot(int ordinal) {
  if (ordinal < 1) throw std::invalid_argument("rfs_slot: ordinal must be >= 1");
  return 1 + 3 * (ordinal - 1);
}

SigSlot next_rfs_after(SigSlot raw) {
  SigSlot s = raw + 1;
  while (classify_slot(s) != SlotClass::Rfs) ++s;
  return s;
}

int dls_ordinal(SigSlot raw) {
  auto c = classify_slot(raw);
  if (c != SlotClass::Dls && c != SlotClass::ControllerDls) throw std::invalid_argument("dls_ordinal: not a DLS slot");
  return raw / 3;
}

SigSlot dls_slot(int ordinal) {
  if (ordinal < 0) throw std::invalid_argument("dls_slot: negative ordinal");
  return 3 * ordinal;
}

SigSlot next_dls_after(SigSlot raw) { return dls_slot(raw / 3 + 1); }

SigSlot child_rfs_slot(SigSlot ix_rfs, int priority) {
  if (priority < 1) throw std::invalid_argument("child_rfs_slot: priority must be >= 1");
  return rfs_slot(rfs_ordinal(ix_rfs) + priority - 1);
}

SigSlot allocation_window_end(SigSlot ix_rfs, int theta) {
  if (theta < 1) throw std::invalid_argument("allocation_window_end: theta must be >= 1");
  return ix_rfs + 3 * theta - 1;
}

SigSlot sr1_retx_slot(SigSlot ix_rfs, int theta, int priority, int u) {
  if (u > theta || u < 0) throw std::invalid_argument("sr1_retx_slot: need 0 <= u <= theta");
  return rfs_slot(rfs_ordinal(ix_rfs) + theta + priority - 1 - u);
}

SigSlot sr2_retx_slot(SigSlot ix_prev_rfs, int priority, int backoff) {
  if (backoff < 1) throw std::invalid_argument("sr2_retx_slot: backoff must be >= 1");
  return rfs_slot(rfs_ordinal(ix_prev_rfs) + backoff + priority - 1);
}

SigSlot sr3_dls_retx_slot(const DlsKnowledge& lk, SigSlot now, SigSlot ix_prev_dls, int backoff, int attempt) {
  if (attempt <= 1) {
    for (SigSlot s = next_dls_after(now); s <= lk.horizon; s = next_dls_after(s))
      if (!lk.occupied.count(s)) return s;
    return next_dls_after(std::max(lk.horizon, now));
  }
  if (backoff < 1) throw std::invalid_argument("sr3_dls_retx_slot: backoff must be >= 1");
  return dls_slot(dls_ordinal(ix_prev_dls) + backoff - 1);
}

std::string to_string(MsgKind k) {
  switch (k) {
    case MsgKind::Dls: return "DLS";
    case MsgKind::RfsD: return "RFS-D";
    case MsgKind::RfsU: return "RFS-U";
    case MsgKind::Asgn: return "ASGN";
    case MsgKind::RfsRs: return "RFS-RS";
    case MsgKind::GNack: return "GNACK";
    case MsgKind::Terminate: return "TERMINATE";
    case MsgKind::EmptyRfs: return "EMPTY-RFS";
    case MsgKind::EmptyAsgn: return "EMPTY-ASGN";
    case MsgKind::NtReport: return "NT-REPORT";
    case MsgKind::RtBroadcast: return "RT";
    case MsgKind::Announce: return "ANNOUNCE";
  }
  return "?";
}

}  // namespace gallop
