#include "gallop/central_scheduler.hpp"

#include <algorithm>
#include <set>

namespace gallop {

namespace {

// Protocol-model check of a new transmission against those already in the slot.
bool fits(const TreeTopology& tree, const std::vector<std::pair<NodeId, std::vector<NodeId>>>& in_slot, NodeId x,
          const std::vector<NodeId>& rx) {
  for (const auto& [y, yrx] : in_slot) {
    if (y == x) return false;
    for (NodeId r : rx)
      if (r == y || std::find(yrx.begin(), yrx.end(), r) != yrx.end() || tree.in_range(y, r)) return false;
    for (NodeId r : yrx)
      if (r == x || tree.in_range(x, r)) return false;
  }
  return true;
}

using SlotTable = std::map<DataSlot, std::vector<std::pair<NodeId, std::vector<NodeId>>>>;

DataSlot first_fit(const TreeTopology& tree, SlotTable& table, DataSlot lb, NodeId x, const std::vector<NodeId>& rx) {
  for (DataSlot t = std::max(lb, 0);; ++t)
    if (fits(tree, table[t], x, rx)) {
      table[t].push_back({x, rx});
      return t;
    }
}

}  // namespace

Schedule schedule_centralized(const TreeTopology& tree, DownlinkMode mode) {
  Schedule s;
  s.dl_mode = mode;
  SlotTable dl;
  std::map<NodeId, DataSlot> last_dl;  // last downlink slot of each parent
  for (NodeId p : tree.parents_in_bfs()) {
    const auto& ch = tree.children_of(p);
    std::vector<std::vector<NodeId>> groups;
    if (mode == DownlinkMode::Broadcast)
      groups.push_back(ch);
    else
      for (NodeId c : ch) groups.push_back({c});
    DataSlot lb = 0;
    if (p != tree.controller) lb = last_dl.at(tree.parent.at(p)) + 1;
    for (const auto& g : groups) {
      // a broadcast occupies every neighbour as a receiver
      std::vector<NodeId> marked = g;
      if (mode == DownlinkMode::Broadcast) marked.assign(tree.neighbors.at(p).begin(), tree.neighbors.at(p).end());
      DataSlot t = first_fit(tree, dl, lb, p, marked);
      s.dl_slots[p].push_back(t);
      s.dl_groups[p].push_back(g);
      lb = t + 1;
      last_dl[p] = t;
    }
  }
  SlotTable ul;
  auto order = tree.bfs_order();
  std::reverse(order.begin(), order.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return tree.depth(a) > tree.depth(b); });
  // slot at which node m sends the packet of origin o
  std::map<std::pair<NodeId, NodeId>, DataSlot> when;
  for (NodeId m : order) {
    if (m == tree.controller) continue;
    NodeId par = tree.parent.at(m);
    DataSlot prev = -1;
    for (NodeId o : tree.uplink_order(m)) {
      DataSlot lb = prev + 1;
      if (o != m) {
        NodeId c = o;
        while (tree.parent.at(c) != m) c = tree.parent.at(c);
        lb = std::max(lb, when.at({c, o}) + 1);
      }
      DataSlot t = first_fit(tree, ul, lb, m, {par});
      when[{m, o}] = t;
      s.ul_slots[m].push_back(t);
      prev = t;
    }
  }
  return s;
}

std::map<NodeId, int> uplink_queues(const TreeTopology& tree) {
  std::map<NodeId, int> q;
  for (NodeId n : tree.nodes())
    if (n != tree.controller) q[n] = tree.subtree_size(n);
  return q;
}

namespace {

struct Item {
  NodeId node = 0;
  bool downlink = false;
  int queue = 0;
  std::vector<std::vector<NodeId>> groups;  // downlink: receivers per remaining packet
  int sent = 0;
};

LqfResult run_lqf(const TreeTopology& tree, std::vector<Item> items) {
  LqfResult res;
  res.frame.kind = FrameKind::Uplink;
  int slot = 0;
  while (true) {
    std::vector<Item*> live;
    for (auto& it : items)
      if (it.queue > 0) live.push_back(&it);
    if (live.empty()) break;
    std::stable_sort(live.begin(), live.end(), [](const Item* a, const Item* b) {
      if (a->queue != b->queue) return a->queue > b->queue;
      if (a->node != b->node) return a->node < b->node;
      return a->downlink && !b->downlink;
    });
    std::vector<std::pair<NodeId, std::vector<NodeId>>> chosen;
    std::set<NodeId> active;
    for (Item* it : live) {
      std::vector<NodeId> rx;
      if (it->downlink)
        rx = it->groups[static_cast<std::size_t>(it->sent)];
      else
        rx = {tree.parent.at(it->node)};
      if (active.count(it->node)) continue;
      bool clash = false;
      for (NodeId r : rx) clash = clash || active.count(r);
      if (clash || !fits(tree, chosen, it->node, rx)) continue;
      chosen.push_back({it->node, rx});
      active.insert(it->node);
      active.insert(rx.begin(), rx.end());
      Transmission t;
      t.slot = slot;
      t.channel = 0;
      t.senders = {it->node};
      t.receivers = rx;
      if (it->downlink) {
        t.payload = {PayloadKind::Command, 0};
        res.schedule.dl_slots[it->node].push_back(slot);
        res.schedule.dl_groups[it->node].push_back(rx);
      } else {
        auto order = tree.uplink_order(it->node);
        t.payload = {PayloadKind::Response, order[static_cast<std::size_t>(it->sent) % order.size()]};
        res.schedule.ul_slots[it->node].push_back(slot);
      }
      res.frame.transmissions.push_back(t);
      ++it->sent;
      --it->queue;
    }
    ++slot;
  }
  res.duration_slots = slot;
  res.frame.length = slot;
  return res;
}

// Queues evolve with the traffic: a node holds only packets it has already received, and in
// closed-loop mode its response exists once the command reached it.
LqfResult run_lqf_dynamic(const TreeTopology& tree, LqfTraffic traffic, DownlinkMode mode) {
  LqfResult res;
  res.frame.kind = FrameKind::Uplink;
  std::map<NodeId, std::vector<NodeId>> held;  // origins waiting at each node, FIFO
  std::map<NodeId, std::vector<std::vector<NodeId>>> dl_left;
  std::set<NodeId> has_cmd;
  auto give_cmd = [&](NodeId n) {
    if (!has_cmd.insert(n).second) return;
    if (n != tree.controller && traffic == LqfTraffic::ClosedLoop) held[n].push_back(n);
    const auto& ch = tree.children_of(n);
    if (ch.empty()) return;
    if (mode == DownlinkMode::Broadcast)
      dl_left[n].push_back(ch);
    else
      for (NodeId c : ch) dl_left[n].push_back({c});
  };
  if (traffic != LqfTraffic::Uplink) {
    give_cmd(tree.controller);
  } else {
    for (NodeId n : tree.nodes())
      if (n != tree.controller) held[n].push_back(n);
  }
  std::size_t expected = traffic == LqfTraffic::Downlink ? 0 : tree.size() - 1;
  std::size_t delivered = 0;
  int slot = 0;
  while (true) {
    bool dl_pending = false;
    for (const auto& kv : dl_left) dl_pending = dl_pending || !kv.second.empty();
    if (delivered == expected && !dl_pending) break;
    struct Cand {
      NodeId node;
      bool downlink;
      int queue;
    };
    std::vector<Cand> live;
    for (const auto& [n, q] : held)
      if (!q.empty()) live.push_back({n, false, static_cast<int>(q.size())});
    for (const auto& [n, g] : dl_left)
      if (!g.empty()) live.push_back({n, true, static_cast<int>(g.size())});
    std::stable_sort(live.begin(), live.end(), [](const Cand& a, const Cand& b) {
      if (a.queue != b.queue) return a.queue > b.queue;
      if (a.node != b.node) return a.node < b.node;
      return a.downlink && !b.downlink;
    });
    std::vector<std::pair<NodeId, std::vector<NodeId>>> chosen;
    std::vector<Cand> fired;
    std::set<NodeId> active;
    for (const auto& c : live) {
      std::vector<NodeId> rx = c.downlink ? dl_left[c.node].front() : std::vector<NodeId>{tree.parent.at(c.node)};
      // a broadcast keeps every neighbour busy, as in the centralized baseline
      std::vector<NodeId> busy = rx;
      if (c.downlink) busy.assign(tree.neighbors.at(c.node).begin(), tree.neighbors.at(c.node).end());
      if (active.count(c.node)) continue;
      bool clash = false;
      for (NodeId r : busy) clash = clash || active.count(r);
      if (clash || !fits(tree, chosen, c.node, busy)) continue;
      chosen.push_back({c.node, busy});
      active.insert(c.node);
      active.insert(busy.begin(), busy.end());
      fired.push_back(c);
    }
    if (fired.empty()) throw Error("lqf: no transmission possible");
    for (const auto& c : fired) {
      Transmission t;
      t.slot = slot;
      t.channel = 0;
      t.senders = {c.node};
      if (c.downlink) {
        t.receivers = dl_left[c.node].front();
        dl_left[c.node].erase(dl_left[c.node].begin());
        t.payload = {PayloadKind::Command, 0};
        res.schedule.dl_slots[c.node].push_back(slot);
        res.schedule.dl_groups[c.node].push_back(t.receivers);
        for (NodeId r : t.receivers) give_cmd(r);
      } else {
        NodeId par = tree.parent.at(c.node);
        NodeId origin = held[c.node].front();
        held[c.node].erase(held[c.node].begin());
        t.receivers = {par};
        t.payload = {PayloadKind::Response, origin};
        res.schedule.ul_slots[c.node].push_back(slot);
        if (par == tree.controller)
          ++delivered;
        else
          held[par].push_back(origin);
      }
      res.frame.transmissions.push_back(t);
    }
    ++slot;
  }
  res.duration_slots = slot;
  res.frame.length = slot;
  return res;
}

}  // namespace

LqfResult schedule_lqf(const TreeTopology& tree, const std::map<NodeId, int>& queue_lengths) {
  std::vector<Item> items;
  for (const auto& [n, q] : queue_lengths) {
    if (n == tree.controller || q <= 0) continue;
    items.push_back({n, false, q, {}, 0});
  }
  return run_lqf(tree, items);
}

LqfResult schedule_lqf(const TreeTopology& tree, LqfTraffic traffic, DownlinkMode mode, LqfQueues queues) {
  if (queues == LqfQueues::Dynamic) return run_lqf_dynamic(tree, traffic, mode);
  std::vector<Item> items;
  for (const auto& [n, q] : uplink_queues(tree)) items.push_back({n, false, q, {}, 0});
  if (traffic == LqfTraffic::ClosedLoop) {
    for (NodeId p : tree.nodes()) {
      const auto& ch = tree.children_of(p);
      if (ch.empty()) continue;
      Item it{p, true, 0, {}, 0};
      if (mode == DownlinkMode::Broadcast)
        it.groups.push_back(ch);
      else
        for (NodeId c : ch) it.groups.push_back({c});
      it.queue = static_cast<int>(it.groups.size());
      items.push_back(it);
    }
  }
  return run_lqf(tree, items);
}

}  // namespace gallop
