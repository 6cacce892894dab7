#include "gallop/schedule.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace gallop {

std::string to_string(ConflictKind k) {
  switch (k) {
    case ConflictKind::ReceiverCollision: return "receiver-collision";
    case ConflictKind::HalfDuplex: return "half-duplex";
    case ConflictKind::DoubleBooking: return "double-booking";
    case ConflictKind::MultiChannel: return "multi-channel";
    case ConflictKind::OutOfRange: return "out-of-range";
    case ConflictKind::Ordering: return "ordering";
  }
  return "?";
}

Frame Schedule::downlink_frame() const {
  Frame f;
  f.kind = FrameKind::Downlink;
  for (const auto& [p, slots] : dl_slots) {
    const auto& groups = dl_groups.at(p);
    for (std::size_t i = 0; i < slots.size(); ++i) {
      Transmission t;
      t.slot = slots[i];
      t.channel = w_d;
      t.senders = {p};
      t.receivers = i < groups.size() ? groups[i] : std::vector<NodeId>{};
      t.payload = {PayloadKind::Command, 0};
      f.transmissions.push_back(t);
      f.length = std::max(f.length, t.slot + 1);
    }
  }
  std::stable_sort(f.transmissions.begin(), f.transmissions.end(),
                   [](const Transmission& a, const Transmission& b) { return a.slot < b.slot; });
  return f;
}

Frame Schedule::uplink_frame(const TreeTopology& tree) const {
  Frame f;
  f.kind = FrameKind::Uplink;
  for (const auto& [m, slots] : ul_slots) {
    if (m == tree.controller) continue;
    auto order = tree.uplink_order(m);
    std::size_t n = std::min(order.size(), slots.size());
    for (std::size_t i = 0; i < n; ++i) {
      Transmission t;
      t.slot = slots[i];
      t.channel = w_u;
      t.senders = {m};
      t.receivers = {tree.parent.at(m)};
      t.payload = {PayloadKind::Response, order[i]};
      f.transmissions.push_back(t);
      f.length = std::max(f.length, t.slot + 1);
    }
  }
  std::stable_sort(f.transmissions.begin(), f.transmissions.end(),
                   [](const Transmission& a, const Transmission& b) { return a.slot < b.slot; });
  return f;
}

static int span_of(const std::map<NodeId, std::vector<DataSlot>>& m) {
  int s = 0;
  for (const auto& kv : m)
    for (DataSlot t : kv.second) s = std::max(s, t + 1);
  return s;
}

int Schedule::dl_span() const { return span_of(dl_slots); }
int Schedule::ul_span() const { return span_of(ul_slots); }

DataSlot Schedule::dl_reception_slot(NodeId n) const {
  for (const auto& [p, groups] : dl_groups)
    for (std::size_t i = 0; i < groups.size(); ++i)
      if (std::find(groups[i].begin(), groups[i].end(), n) != groups[i].end()) return dl_slots.at(p)[i];
  return -1;
}

std::vector<Conflict> verify_frame(const Frame& frame, const TreeTopology& tree) {
  std::vector<Conflict> out;
  std::map<DataSlot, std::vector<const Transmission*>> by_slot;
  for (const auto& t : frame.transmissions) by_slot[t.slot].push_back(&t);
  auto add = [&](ConflictKind k, DataSlot s, NodeId a, NodeId b, std::string d) {
    out.push_back(Conflict{k, frame.kind, s, a, b, std::move(d)});
  };
  for (const auto& [slot, txs] : by_slot) {
    std::map<NodeId, int> tx_count, rx_count;
    std::map<NodeId, std::set<Channel>> chans;
    for (const auto* t : txs) {
      for (NodeId s : t->senders) {
        ++tx_count[s];
        chans[s].insert(t->channel);
      }
      for (NodeId r : t->receivers) {
        ++rx_count[r];
        chans[r].insert(t->channel);
      }
    }
    for (const auto& [n, c] : tx_count) {
      if (c > 1) add(ConflictKind::DoubleBooking, slot, n, 0, "transmits twice");
      if (rx_count.count(n)) add(ConflictKind::HalfDuplex, slot, n, 0, "transmits and receives");
    }
    for (const auto& [n, c] : rx_count)
      if (c > 1) add(ConflictKind::DoubleBooking, slot, n, 0, "receives twice");
    for (const auto& [n, cs] : chans)
      if (cs.size() > 1) add(ConflictKind::MultiChannel, slot, n, 0, "two channels");
    for (const auto* x : txs) {
      for (NodeId r : x->receivers) {
        bool reach = false;
        for (NodeId s : x->senders) reach = reach || tree.in_range(s, r);
        if (!reach) add(ConflictKind::OutOfRange, slot, r, x->senders.empty() ? 0 : x->senders[0], "receiver out of range");
        for (const auto* y : txs) {
          if (y == x || y->channel != x->channel) continue;
          for (NodeId s2 : y->senders) {
            if (s2 == r) continue;  // reported as half-duplex
            if (std::find(x->senders.begin(), x->senders.end(), s2) != x->senders.end()) continue;
            if (tree.in_range(s2, r)) add(ConflictKind::ReceiverCollision, slot, r, s2, "interferer in range of receiver");
          }
        }
      }
    }
  }
  return out;
}

std::vector<Conflict> verify_frames(const std::vector<Frame>& frames, const TreeTopology& tree) {
  std::vector<Conflict> out;
  for (const auto& f : frames) {
    auto c = verify_frame(f, tree);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

std::vector<Conflict> verify_schedule(const Schedule& s, const TreeTopology& tree) {
  return verify_frames({s.downlink_frame(), s.uplink_frame(tree)}, tree);
}

std::vector<Conflict> verify_ordering(const Schedule& s, const TreeTopology& tree) {
  std::vector<Conflict> out;
  auto add = [&](FrameKind f, DataSlot slot, NodeId a, NodeId b, std::string d) {
    out.push_back(Conflict{ConflictKind::Ordering, f, slot, a, b, std::move(d)});
  };
  for (const auto& [p, slots] : s.dl_slots) {
    if (p == tree.controller) continue;
    DataSlot r = s.dl_reception_slot(p);
    if (r < 0) {
      add(FrameKind::Downlink, 0, p, tree.parent.at(p), "parent transmits without receiving the command");
      continue;
    }
    for (DataSlot t : slots)
      if (t <= r) add(FrameKind::Downlink, t, p, tree.parent.at(p), "child transmits before its parent");
  }
  for (NodeId n : tree.nodes()) {
    if (n == tree.controller || tree.is_leaf(n)) continue;
    if (!s.dl_slots.count(n)) {
      add(FrameKind::Downlink, 0, n, 0, "parent has no downlink slot");
      continue;
    }
    std::set<NodeId> covered;
    for (const auto& g : s.dl_groups.at(n)) covered.insert(g.begin(), g.end());
    for (NodeId c : tree.children_of(n))
      if (!covered.count(c)) add(FrameKind::Downlink, 0, n, c, "child not covered by downlink");
  }
  if (!tree.is_leaf(tree.controller)) {
    std::set<NodeId> covered;
    if (s.dl_groups.count(tree.controller))
      for (const auto& g : s.dl_groups.at(tree.controller)) covered.insert(g.begin(), g.end());
    for (NodeId c : tree.children_of(tree.controller))
      if (!covered.count(c)) add(FrameKind::Downlink, 0, tree.controller, c, "child not covered by downlink");
  }
  // uplink: slot of each (node, origin)
  std::map<std::pair<NodeId, NodeId>, DataSlot> when;
  for (const auto& [m, slots] : s.ul_slots) {
    if (m == tree.controller) continue;
    auto order = tree.uplink_order(m);
    if (slots.size() != order.size())
      add(FrameKind::Uplink, 0, m, 0,
          "expected " + std::to_string(order.size()) + " uplink slots, got " + std::to_string(slots.size()));
    for (std::size_t i = 0; i < std::min(order.size(), slots.size()); ++i) when[{m, order[i]}] = slots[i];
    for (std::size_t i = 1; i < slots.size(); ++i)
      if (slots[i] <= slots[i - 1]) add(FrameKind::Uplink, slots[i], m, 0, "uplink slots not ascending");
  }
  for (NodeId n : tree.nodes()) {
    if (n == tree.controller) continue;
    if (!s.ul_slots.count(n)) add(FrameKind::Uplink, 0, n, 0, "node has no uplink slot");
  }
  for (const auto& [key, t] : when) {
    auto [m, origin] = key;
    if (origin == m) continue;
    NodeId c = origin;
    while (tree.parent.at(c) != m) c = tree.parent.at(c);
    auto it = when.find({c, origin});
    if (it != when.end() && it->second >= t)
      add(FrameKind::Uplink, t, m, c, "forwarding before reception of " + std::to_string(origin));
  }
  return out;
}

int cycle_time(const Schedule& s) { return s.dl_span() + s.ul_span(); }

double slots_to_ms(double slots, double slot_us) { return slots * slot_us / 1000.0; }

}  // namespace gallop

namespace gallop {

namespace {

struct Placed {
  NodeId tx;
  std::vector<NodeId> rx;
};

bool clash(const Placed& a, const Placed& b, const TreeTopology& tree) {
  auto has = [](const std::vector<NodeId>& v, NodeId n) { return std::find(v.begin(), v.end(), n) != v.end(); };
  if (a.tx == b.tx || has(b.rx, a.tx) || has(a.rx, b.tx)) return true;
  for (NodeId r : a.rx)
    if (has(b.rx, r) || tree.in_range(b.tx, r)) return true;
  for (NodeId r : b.rx)
    if (tree.in_range(a.tx, r)) return true;
  return false;
}

class SlotBook {
 public:
  explicit SlotBook(const TreeTopology& tree) : tree_(tree) {}
  DataSlot place(const Placed& p, DataSlot from) {
    for (DataSlot t = std::max(from, 0);; ++t) {
      bool ok = true;
      for (const auto& q : by_slot_[t])
        if (clash(p, q, tree_)) {
          ok = false;
          break;
        }
      if (ok) {
        by_slot_[t].push_back(p);
        return t;
      }
    }
  }

 private:
  const TreeTopology& tree_;
  std::map<DataSlot, std::vector<Placed>> by_slot_;
};

}  // namespace

RepairResult repair_schedule(const Schedule& s, const TreeTopology& tree) {
  RepairResult res;
  res.schedule = s;
  Schedule& out = res.schedule;

  // downlink: (slot, parent, index) in original slot order
  std::vector<std::tuple<DataSlot, NodeId, std::size_t>> dl;
  for (const auto& [p, slots] : s.dl_slots)
    for (std::size_t i = 0; i < slots.size(); ++i) dl.emplace_back(slots[i], p, i);
  std::sort(dl.begin(), dl.end());
  SlotBook dbook(tree);
  for (const auto& [t0, p, i] : dl) {
    const auto& groups = s.dl_groups.at(p);
    Placed x{p, i < groups.size() ? groups[i] : std::vector<NodeId>{}};
    DataSlot lb = t0;
    if (p != tree.controller) lb = std::max(lb, out.dl_reception_slot(p) + 1);
    DataSlot t = dbook.place(x, lb);
    if (t != t0) ++res.moved;
    out.dl_slots[p][i] = t;
  }

  // uplink: own slot order and forwarding after reception
  std::vector<std::tuple<DataSlot, NodeId, std::size_t>> ul;
  for (const auto& [m, slots] : s.ul_slots)
    for (std::size_t i = 0; i < slots.size(); ++i) ul.emplace_back(slots[i], m, i);
  std::sort(ul.begin(), ul.end());
  std::map<std::pair<NodeId, NodeId>, DataSlot> when;  // (sender, origin) -> placed slot
  SlotBook ubook(tree);
  for (const auto& [t0, m, i] : ul) {
    auto order = tree.uplink_order(m);
    DataSlot lb = t0;
    if (i > 0) lb = std::max(lb, out.ul_slots[m][i - 1] + 1);
    if (i < order.size() && order[i] != m) {
      NodeId c = order[i];
      while (tree.parent.at(c) != m) c = tree.parent.at(c);
      auto it = when.find({c, order[i]});
      if (it != when.end()) lb = std::max(lb, it->second + 1);
    }
    DataSlot t = ubook.place(Placed{m, {tree.parent.at(m)}}, lb);
    if (t != t0) ++res.moved;
    out.ul_slots[m][i] = t;
    if (i < order.size()) when[{m, order[i]}] = t;
  }
  return res;
}

}  // namespace gallop
