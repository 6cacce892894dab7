#pragma once

// Hand-built inputs shared by the retransmission tests and the acceptance binary.

#include "gallop/retransmission.hpp"

namespace gallop::fixtures {

// Base schedule of the fig8 network with node 2's forwarding of node 6 on t5, the slot the
// extrapolation examples refer to. The distributed scheduler itself places node 7 on t2 and
// node 2 on {t3,t4,t5}; both are valid.
inline Schedule fig8_reference_schedule(const TreeTopology& t) {
  Schedule s;
  s.dl_slots = {{1, {0}}, {2, {1}}, {3, {2}}};
  s.dl_groups = {{1, {t.children_of(1)}}, {2, {t.children_of(2)}}, {3, {t.children_of(3)}}};
  s.ul_slots = {{4, {0}}, {5, {0}}, {6, {1}}, {7, {3}}, {3, {1, 2}}, {2, {4, 5, 6}}};
  return s;
}

inline RelayTable fig8_relays(const TreeTopology& t) {
  return static_relays(t, {{2, 4}, {4, 2}, {6, 7}, {7, 6}});
}

inline void lose(ReceptionRecord& r, NodeId holder, NodeId origin) { r.held[holder].erase(origin); }

// Node 2's forwarded copy of node 6 missing at the controller, still in node 2's buffer.
inline ReceptionRecord case_a(const TreeTopology& t) {
  auto r = ReceptionRecord::complete(t);
  lose(r, 1, 6);
  r.overheard[4].insert(6);
  return r;
}

// Node 6's packet never reached node 2.
inline ReceptionRecord case_b(const TreeTopology& t) {
  auto r = ReceptionRecord::complete(t);
  lose(r, 1, 6);
  lose(r, 2, 6);
  r.overheard[7].insert(6);
  return r;
}

// Case B plus node 4's only packet missing at the controller (node 2 overheard it).
inline ReceptionRecord case_c(const TreeTopology& t) {
  auto r = case_b(t);
  lose(r, 1, 4);
  r.overheard[2].insert(4);
  return r;
}

// Node 6 never got the command, so it had nothing to send.
inline ReceptionRecord case_d(const TreeTopology& t) {
  auto r = ReceptionRecord::complete(t);
  lose(r, 1, 6);
  lose(r, 2, 6);
  lose(r, 6, 6);
  r.has_command.erase(6);
  return r;
}

}  // namespace gallop::fixtures
