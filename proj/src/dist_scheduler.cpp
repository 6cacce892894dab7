#include "gallop/dist_scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace gallop {

std::vector<std::vector<NodeId>> downlink_groups(const TreeTopology& tree, NodeId parent, const SignalingParams& p) {
  const auto& ch = tree.children_of(parent);
  std::vector<std::vector<NodeId>> g;
  if (ch.empty()) return g;
  switch (p.dl_mode) {
    case DownlinkMode::Broadcast: g.push_back(ch); break;
    case DownlinkMode::Groups: {
      auto it = p.dl_groups.find(parent);
      if (it != p.dl_groups.end()) {
        std::set<NodeId> seen;
        for (const auto& grp : it->second) {
          for (NodeId n : grp)
            if (std::find(ch.begin(), ch.end(), n) == ch.end() || !seen.insert(n).second)
              throw ConfigError("downlink group lists a non-child or repeats a child of " + std::to_string(parent));
          g.push_back(grp);
        }
        if (seen.size() != ch.size()) throw ConfigError("downlink groups do not cover all children of " +
                                                        std::to_string(parent));
        break;
      }
      [[fallthrough]];
    }
    case DownlinkMode::Distinct:
      for (NodeId c : ch) g.push_back({c});
      break;
  }
  return g;
}

// ---- local knowledge ------------------------------------------------------

void LocalKnowledge::occupy(FrameKind f, DataSlot t, NodeId owner, bool transmits) {
  if (owner == 0) return;
  occupied_[{f, t}].insert(owner);
  (transmits ? tx_ : rx_)[{f, t}].insert(owner);
}

void LocalKnowledge::occupy(const Occupancy& o) {
  occupy(o.frame, o.slot, o.tx, true);
  occupy(o.frame, o.slot, o.rx, false);
}

std::set<NodeId> LocalKnowledge::transmitters(FrameKind f, DataSlot t) const {
  auto it = tx_.find({f, t});
  return it == tx_.end() ? std::set<NodeId>{} : it->second;
}

std::set<NodeId> LocalKnowledge::receivers(FrameKind f, DataSlot t) const {
  auto it = rx_.find({f, t});
  return it == rx_.end() ? std::set<NodeId>{} : it->second;
}

std::set<DataSlot> LocalKnowledge::recorded_slots(FrameKind f) const {
  std::set<DataSlot> out;
  for (const auto& kv : occupied_)
    if (kv.first.first == f) out.insert(kv.first.second);
  return out;
}

bool LocalKnowledge::free_for(FrameKind f, DataSlot t, const std::set<NodeId>& allowed) const {
  auto it = occupied_.find({f, t});
  if (it == occupied_.end()) return true;
  for (NodeId o : it->second)
    if (!allowed.count(o)) return false;
  return true;
}

std::vector<DataSlot> LocalKnowledge::earliest_free(FrameKind f, int n, DataSlot lb, const std::set<NodeId>& allowed,
                                                    const std::set<DataSlot>& extra_blocked) const {
  std::vector<DataSlot> out;
  for (DataSlot t = std::max(lb, 0); static_cast<int>(out.size()) < n; ++t)
    if (!extra_blocked.count(t) && free_for(f, t, allowed)) out.push_back(t);
  return out;
}

std::vector<DataSlot> LocalKnowledge::busy_slots(FrameKind f, const std::set<NodeId>& allowed) const {
  std::vector<DataSlot> out;
  for (const auto& [key, owners] : occupied_) {
    if (key.first != f) continue;
    for (NodeId o : owners)
      if (!allowed.count(o)) {
        out.push_back(key.second);
        break;
      }
  }
  return out;
}

// ---- trace ---------------------------------------------------------------

std::string format_trace_line(const TraceEvent& e) {
  std::ostringstream os;
  os << 's' << e.slot << '\t' << "ch" << e.channel << '\t' << e.sender << '\t' << to_string(e.kind) << '\t'
     << (e.outcome.empty() ? "-" : e.outcome) << '\t' << (e.detail.empty() ? "-" : e.detail);
  return os.str();
}

std::optional<TraceEvent> parse_trace_line(const std::string& line) {
  if (line.empty() || line[0] == '#') return std::nullopt;
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, '\t')) f.push_back(item);
  if (f.size() != 6 || f[0].size() < 2 || f[0][0] != 's' || f[1].rfind("ch", 0) != 0) return std::nullopt;
  TraceEvent e;
  try {
    e.slot = std::stoi(f[0].substr(1));
    e.channel = std::stoi(f[1].substr(2));
    e.sender = static_cast<NodeId>(std::stoul(f[2]));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  bool known = false;
  for (int k = 0; k <= static_cast<int>(MsgKind::Announce); ++k)
    if (to_string(static_cast<MsgKind>(k)) == f[3]) {
      e.kind = static_cast<MsgKind>(k);
      known = true;
    }
  if (!known) return std::nullopt;
  e.outcome = f[4] == "-" ? "" : f[4];
  e.detail = f[5] == "-" ? "" : f[5];
  return e;
}

// ---- agent ---------------------------------------------------------------

NodeAgent::NodeAgent(NodeId id, const TreeTopology& tree, const SignalingParams& params, std::uint64_t seed)
    : id_(id), tree_(tree), p_(params), rng_(derive_seed(seed, 0x5167, id)) {
  children_ = tree.children_of(id);
  groups_ = downlink_groups(tree, id, params);
  if (is_controller()) {
    phase_ = Phase::Family;
    if (children_.empty()) {
      terminate_slot_ = 0;
    } else {
      for (std::size_t i = 0; i < groups_.size(); ++i) dl_alloc_.push_back(static_cast<DataSlot>(i));
      record(FrameKind::Downlink, id_, dl_alloc_);
      start_family(-1);
    }
  }
}

int NodeAgent::backoff() {
  std::uniform_int_distribution<int> b(1, std::max(1, p_.psi));
  return b(rng_);
}

SigSlot NodeAgent::next_free_rfs(SigSlot after) const {
  int o = rfs_ordinal(next_rfs_after(after));
  while (lk_.rfs_reserved.count(o)) ++o;
  return rfs_slot(o);
}

void NodeAgent::start_family(SigSlot now) {
  family_started_ = true;
  int theta = static_cast<int>(children_.size());
  if (is_controller()) {
    dls_first_ = 0;
    ix_ = 1;
  } else {
    DlsKnowledge k;
    k.occupied = lk_.dls_planned;
    dls_first_ = sr3_dls_retx_slot(k, now, -1, 1, 1);
    int o = rfs_ordinal(next_rfs_after(dls_first_));
    auto clash = [&](int start) {
      for (int i = 0; i < theta; ++i)
        if (lk_.rfs_reserved.count(start + i)) return true;
      return false;
    };
    while (clash(o)) ++o;
    ix_ = rfs_slot(o);
  }
  for (int i = 0; i < theta; ++i) lk_.rfs_reserved.insert(rfs_ordinal(ix_) + i);
  window_end_ = allocation_window_end(ix_, theta);
  dls_tx_.insert(dls_first_);
  lk_.dls_planned.insert(dls_first_);
}

void NodeAgent::start_request(MsgKind kind, SigSlot now) {
  bool first = (phase_ == Phase::NeedDls);
  req_ = Request{};
  req_.kind = kind;
  req_.frame = kind == MsgKind::RfsD ? FrameKind::Downlink : FrameKind::Uplink;
  if (req_.frame == FrameKind::Downlink) {
    req_.n = static_cast<int>(groups_.size());
    DataSlot rx = -1;
    for (std::size_t i = 0; i < parent_groups_.size() && i < parent_dl_.size(); ++i)
      if (std::find(parent_groups_[i].begin(), parent_groups_[i].end(), id_) != parent_groups_[i].end())
        rx = parent_dl_[i];
    if (rx < 0 && !parent_dl_.empty()) rx = *std::max_element(parent_dl_.begin(), parent_dl_.end());
    req_.lb = rx + 1;
    phase_ = Phase::DlRequest;
  } else {
    int s = 0;
    DataSlot lb = 0;
    for (const auto& [c, slots] : child_ul_) {
      s += static_cast<int>(slots.size());
      for (DataSlot t : slots) lb = std::max(lb, t + 1);
    }
    req_.n = s + 1;
    req_.lb = lb;
    phase_ = Phase::UlRequest;
  }
  int pr = tree_.priority(id_);
  if (first) {
    SigSlot fam = child_rfs_slot(parent_ix_, pr);
    if (fam > now) {
      req_.next_tx = fam;
      req_.family_slot = true;
    } else {
      req_.family_slot = false;
      req_.attempts = 1;  // the family slot has passed: treat as first retransmission
      SigSlot t = sr1_retx_slot(parent_ix_, parent_theta_, pr, std::min(parent_u_, parent_theta_));
      req_.sr1_planned = true;
      while (t <= now) t = rfs_slot(rfs_ordinal(t) + backoff());
      req_.next_tx = t;
    }
  } else {
    req_.family_slot = false;
    req_.next_tx = next_free_rfs(now);
  }
}

void NodeAgent::plan_retry(SigSlot now) {
  req_.awaiting = false;
  int pr = tree_.priority(id_);
  SigSlot t;
  if (req_.family_slot && req_.attempts == 1) {
    t = sr1_retx_slot(parent_ix_, parent_theta_, pr, std::min(parent_u_, parent_theta_));
    req_.sr1_planned = true;
  } else {
    t = sr2_retx_slot(req_.last_tx, pr, backoff());
    req_.sr1_planned = false;
  }
  while (t <= now) t = rfs_slot(rfs_ordinal(t) + backoff());
  req_.next_tx = t;
}

std::vector<NodeId> NodeAgent::receivers_of(NodeId x, FrameKind f, std::size_t i) const {
  if (f == FrameKind::Uplink) return {tree_.parent.at(x)};
  auto g = x == id_ ? groups_ : downlink_groups(tree_, x, p_);
  if (i < g.size()) return g[i];
  return tree_.children_of(x);
}

bool NodeAgent::compatible(FrameKind f, DataSlot t, NodeId x, const std::vector<NodeId>& rx) const {
  auto txs = lk_.transmitters(f, t);
  auto rxs = lk_.receivers(f, t);
  auto in_rx = [&](NodeId n) { return std::find(rx.begin(), rx.end(), n) != rx.end(); };
  for (NodeId n : txs)
    if (n == x || in_rx(n)) return false;
  for (NodeId n : rxs)
    if (n == x || in_rx(n)) return false;
  for (NodeId y : rxs)
    if (tree_.in_range(y, x)) return false;
  for (NodeId z : txs)
    for (NodeId r : rx)
      if (tree_.in_range(z, r)) return false;
  return true;
}

bool NodeAgent::grantable(FrameKind f, DataSlot t, NodeId child, const std::vector<NodeId>& rx) const {
  if (!compatible(f, t, child, rx)) return false;
  for (NodeId z : lk_.transmitters(f, t))
    if (z == id_ || tree_.in_range(z, id_)) return false;
  return !lk_.receivers(f, t).count(id_);
}

std::vector<DataSlot> NodeAgent::propose(FrameKind f, int n, DataSlot lb) const {
  std::vector<DataSlot> out;
  for (DataSlot t = std::max(lb, 0); static_cast<int>(out.size()) < n; ++t)
    if (compatible(f, t, id_, receivers_of(id_, f, out.size()))) out.push_back(t);
  return out;
}

std::vector<Occupancy> NodeAgent::committed() const {
  return lk_.export_records([&](NodeId n) { return n == id_ || tree_.in_range(n, id_); });
}

SignalingMessage NodeAgent::base_message(MsgKind k) const {
  SignalingMessage m;
  m.kind = k;
  m.sender = id_;
  if (p_.piggyback) m.announce = committed();
  return m;
}

void NodeAgent::plan_announce(SigSlot after) {
  SigSlot base = next_dls_after(after);
  for (int k = 0; k < p_.announce_repeats; ++k) {
    SigSlot d = dls_slot(dls_ordinal(base) + backoff() - 1);
    while (announce_at_.count(d) || dls_tx_.count(d)) d = next_dls_after(d);
    announce_at_.insert(d);
    base = next_dls_after(d);
  }
}

std::optional<SignalingMessage> NodeAgent::transmit(SigSlot s) {
  auto cls = classify_slot(s);
  if (cls == SlotClass::Asgn) {
    auto it = asgn_out_.find(s);
    if (it == asgn_out_.end()) return std::nullopt;
    auto m = it->second;
    asgn_out_.erase(it);
    if (p_.piggyback) m.announce = committed();
    return m;
  }
  if (cls == SlotClass::Rfs) {
    bool requesting = phase_ == Phase::DlRequest || phase_ == Phase::UlRequest;
    if (!requesting || req_.awaiting || req_.next_tx != s) return std::nullopt;
    auto m = base_message(req_.kind);
    NodeId par = tree_.parent.at(id_);
    m.addressees = {par};
    RfsPayload r;
    r.frame = req_.frame;
    r.lower_bound = req_.lb;
    r.slots = propose(req_.frame, req_.n, req_.lb);
    std::vector<NodeId> all_rx;
    if (req_.frame == FrameKind::Uplink) all_rx = {par};
    else all_rx = children_;
    for (DataSlot t : lk_.recorded_slots(req_.frame))
      if (!compatible(req_.frame, t, id_, all_rx)) r.known_busy.push_back(t);
    if (req_.frame == FrameKind::Uplink && p_.audit) {
      auto tab = subtree_table();
      r.table_dl = tab.dl_slots;
      r.table_ul = tab.ul_slots;
    }
    m.payload = r;
    req_.last_tx = s;
    req_.attempts += 1;
    req_.awaiting = true;
    return m;
  }
  // DLS class
  if (is_controller() && terminate_slot_ == s && !terminate_sent_) {
    terminate_sent_ = true;
    if (children_.empty()) {
      auto m = base_message(MsgKind::Dls);
      DlsPayload d;
      d.ix_rfs = 1;
      m.payload = d;
      return m;
    }
    auto m = base_message(MsgKind::Terminate);
    m.addressees = children_;
    return m;
  }
  if (dls_tx_.count(s)) {
    dls_tx_.erase(s);
    announce_at_.erase(s);
    auto m = base_message(MsgKind::Dls);
    m.addressees = children_;
    DlsPayload d;
    d.child_priority = children_;
    d.ix_rfs = ix_;
    d.own_downlink = dl_alloc_;
    d.groups = groups_;
    d.allocated_children = static_cast<int>(heard_.size());
    d.retransmission = s != dls_first_;
    m.payload = d;
    last_dls_ = s;
    return m;
  }
  if (announce_at_.count(s)) {
    announce_at_.erase(s);
    auto m = base_message(MsgKind::Announce);
    if (!p_.piggyback) m.announce = committed();
    return m;
  }
  return std::nullopt;
}

void NodeAgent::record(FrameKind f, NodeId x, const std::vector<DataSlot>& slots) {
  for (std::size_t i = 0; i < slots.size(); ++i) {
    lk_.occupy(f, slots[i], x, true);
    for (NodeId r : receivers_of(x, f, i)) lk_.occupy(f, slots[i], r, false);
  }
}

void NodeAgent::learn(const SignalingMessage& m) {
  for (const auto& o : m.announce) lk_.occupy(o);
  if (const auto* d = std::get_if<DlsPayload>(&m.payload)) {
    record(FrameKind::Downlink, m.sender, d->own_downlink);
    if (d->ix_rfs >= 1 && classify_slot(d->ix_rfs) == SlotClass::Rfs)
      for (std::size_t i = 0; i < d->child_priority.size(); ++i)
        lk_.rfs_reserved.insert(rfs_ordinal(d->ix_rfs) + static_cast<int>(i));
    lk_.allocated_children[m.sender] = d->allocated_children;
  } else if (const auto* a = std::get_if<AsgnPayload>(&m.payload)) {
    for (NodeId ad : m.addressees) record(a->frame, ad, a->slots);
  } else if (const auto* r = std::get_if<RfsPayload>(&m.payload)) {
    // overheard proposals are kept as tentative occupancy
    bool to_me = std::find(m.addressees.begin(), m.addressees.end(), id_) != m.addressees.end();
    if (p_.record_proposals && !to_me) record(r->frame, m.sender, r->slots);
  }
}

void NodeAgent::grant(NodeId child, const RfsPayload& req, MsgKind kind, SigSlot s) {
  auto& table = req.frame == FrameKind::Downlink ? child_dl_ : child_ul_;
  std::vector<DataSlot> alloc;
  auto it = table.find(child);
  if (it != table.end()) {
    alloc = it->second;
  } else {
    std::set<DataSlot> blocked(req.known_busy.begin(), req.known_busy.end());
    child_busy_[child] = blocked;
    bool ok = !req.slots.empty();
    for (std::size_t i = 0; i < req.slots.size(); ++i) {
      DataSlot t = req.slots[i];
      ok = ok && t >= req.lower_bound && !blocked.count(t) &&
           grantable(req.frame, t, child, receivers_of(child, req.frame, i)) && (i == 0 || t > req.slots[i - 1]);
    }
    int n = static_cast<int>(req.slots.size());
    if (kind == MsgKind::RfsD && n != static_cast<int>(downlink_groups(tree_, child, p_).size())) ok = false;
    if (ok) {
      alloc = req.slots;
    } else {
      DataSlot lb = req.lower_bound;
      if (!req.slots.empty()) lb = std::max(lb, *std::min_element(req.slots.begin(), req.slots.end()));
      for (DataSlot t = std::max(lb, 0); static_cast<int>(alloc.size()) < std::max(n, 1); ++t)
        if (!blocked.count(t) && grantable(req.frame, t, child, receivers_of(child, req.frame, alloc.size())))
          alloc.push_back(t);
    }
    table[child] = alloc;
    record(req.frame, child, alloc);
  }
  SignalingMessage m;
  m.kind = MsgKind::Asgn;
  m.sender = id_;
  m.addressees = {child};
  AsgnPayload a;
  a.frame = req.frame;
  a.slots = alloc;
  m.payload = a;
  asgn_out_[s + 1] = m;
}

void NodeAgent::on_receive(const SignalingMessage& m, SigSlot s) {
  learn(m);
  bool to_me = std::find(m.addressees.begin(), m.addressees.end(), id_) != m.addressees.end();
  NodeId par = is_controller() ? 0 : tree_.parent.at(id_);
  if (m.kind == MsgKind::Dls && m.sender == par) {
    const auto& d = std::get<DlsPayload>(m.payload);
    parent_u_ = d.allocated_children;
    if (!got_dls_) {
      got_dls_ = true;
      parent_ix_ = d.ix_rfs;
      parent_theta_ = static_cast<int>(d.child_priority.size());
      parent_dl_ = d.own_downlink;
      parent_groups_ = d.groups;
      start_request(children_.empty() ? MsgKind::RfsU : MsgKind::RfsD, s);
    } else if (!req_.awaiting && req_.sr1_planned && req_.next_tx > s) {
      SigSlot t = sr1_retx_slot(parent_ix_, parent_theta_, tree_.priority(id_), std::min(parent_u_, parent_theta_));
      if (t > s) req_.next_tx = t;
    }
    return;
  }
  if (m.kind == MsgKind::Asgn && m.sender == par && to_me) {
    const auto& a = std::get<AsgnPayload>(m.payload);
    bool matches = req_.awaiting && ((phase_ == Phase::DlRequest && a.frame == FrameKind::Downlink) ||
                                     (phase_ == Phase::UlRequest && a.frame == FrameKind::Uplink));
    if (!matches) {
      const auto& mine = a.frame == FrameKind::Downlink ? dl_alloc_ : ul_alloc_;
      if (mine != a.slots) log.push_back("s" + std::to_string(s) + ": unexpected ASGN dropped");
      return;
    }
    req_.awaiting = false;
    req_.next_tx = -1;
    record(a.frame, id_, a.slots);
    if (a.frame == FrameKind::Downlink) {
      dl_alloc_ = a.slots;
      phase_ = Phase::Family;
      start_family(s);
    } else {
      ul_alloc_ = a.slots;
      phase_ = Phase::Done;
      if (p_.announce_commits) plan_announce(s);
    }
    return;
  }
  if ((m.kind == MsgKind::RfsD || m.kind == MsgKind::RfsU) && to_me) {
    if (!family_started_ ||
        std::find(children_.begin(), children_.end(), m.sender) == children_.end()) {
      log.push_back("s" + std::to_string(s) + ": RFS from non-child dropped");
      return;
    }
    heard_.insert(m.sender);
    const auto& req = std::get<RfsPayload>(m.payload);
    for (const auto& [n, v] : req.table_dl) table_dl_[n] = v;
    for (const auto& [n, v] : req.table_ul) table_ul_[n] = v;
    grant(m.sender, req, m.kind, s);
  }
}

void NodeAgent::plan_dls_retx(SigSlot now, int attempt) {
  SigSlot d;
  if (attempt <= 1) {
    DlsKnowledge k;
    k.occupied = lk_.dls_planned;
    d = sr3_dls_retx_slot(k, now, last_dls_, 1, 1);
  } else {
    int b = backoff();
    d = sr3_dls_retx_slot({}, now, last_dls_ < 0 ? dls_first_ : last_dls_, b, attempt);
    if (d <= now) d = dls_slot(dls_ordinal(next_dls_after(now)) + b - 1);
  }
  dls_tx_.insert(d);
  lk_.dls_planned.insert(d);
  ++dls_retx_;
  int theta = static_cast<int>(children_.size());
  SigSlot after = std::max(d, window_end_);
  SigSlot a = rfs_slot(rfs_ordinal(ix_) + 2 * theta - 1);
  SigSlot b = rfs_slot(rfs_ordinal(next_rfs_after(after)) + theta + std::max(1, p_.psi));
  followup_deadline_ = std::max(a, b) + 1;
}

void NodeAgent::on_slot_end(SigSlot s) {
  // child: missing ASGN
  if ((phase_ == Phase::DlRequest || phase_ == Phase::UlRequest) && req_.awaiting && s >= req_.last_tx + 1)
    plan_retry(s);

  if (!family_started_) return;
  bool all_ul = child_ul_.size() == children_.size();
  if (phase_ == Phase::Family && all_ul && asgn_out_.empty()) {
    if (is_controller()) {
      if (terminate_slot_ < 0) {
        terminate_slot_ = next_dls_after(s);
        if (p_.audit) run_audit();
      }
    } else {
      start_request(MsgKind::RfsU, s);
    }
  }
  if (heard_.size() == children_.size()) return;
  // allocation-window monitoring
  if (classify_slot(s) == SlotClass::Rfs && s >= ix_ && s <= window_end_ && !window_retx_done_) {
    for (NodeId c : children_)
      if (!heard_.count(c) && child_rfs_slot(ix_, tree_.priority(c)) == s) {
        plan_dls_retx(s, 1);
        window_retx_done_ = true;
        break;
      }
  }
  if (s == window_end_ && !window_retx_done_) {
    plan_dls_retx(s, 1);
    window_retx_done_ = true;
  } else if (followup_deadline_ >= 0 && s == followup_deadline_ && dls_tx_.empty()) {
    plan_dls_retx(s, dls_retx_ + 1);
  }
}

Schedule NodeAgent::subtree_table() const {
  Schedule t;
  t.dl_mode = p_.dl_mode;
  t.w_d = p_.w_d;
  t.w_u = p_.w_u;
  t.dl_slots = table_dl_;
  t.ul_slots = table_ul_;
  if (!children_.empty()) t.dl_slots[id_] = dl_alloc_;
  for (const auto& [c, v] : child_dl_) t.dl_slots[c] = v;
  for (const auto& [c, v] : child_ul_) t.ul_slots[c] = v;
  for (const auto& kv : t.dl_slots) t.dl_groups[kv.first] = downlink_groups(tree_, kv.first, p_);
  return t;
}

void NodeAgent::run_audit() {
  auto table = subtree_table();
  audit_conflicts_ = static_cast<int>(verify_schedule(table, tree_).size());
  audit_ = audit_conflicts_ ? repair_schedule(table, tree_) : RepairResult{table, 0};
}

bool NodeAgent::done() const {
  if (is_controller()) return terminate_sent_;
  return phase_ == Phase::Done && asgn_out_.empty();
}

// ---- driver --------------------------------------------------------------

static std::string describe(const SignalingMessage& m) {
  std::ostringstream os;
  auto list = [&](const std::vector<DataSlot>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << 't' << v[i];
  };
  if (const auto* d = std::get_if<DlsPayload>(&m.payload)) {
    os << "ix=s" << d->ix_rfs << " dl=";
    list(d->own_downlink);
    os << " U=" << d->allocated_children << (d->retransmission ? " retx" : "");
  } else if (const auto* r = std::get_if<RfsPayload>(&m.payload)) {
    os << (r->frame == FrameKind::Downlink ? "D=" : "U=");
    list(r->slots);
  } else if (const auto* a = std::get_if<AsgnPayload>(&m.payload)) {
    os << (a->frame == FrameKind::Downlink ? "D=" : "U=");
    list(a->slots);
  }
  return os.str();
}

SignalingResult run_signaling(const TreeTopology& tree, RadioEnvironment& radio, const SignalingParams& params,
                              std::uint64_t seed) {
  SignalingResult res;
  std::vector<NodeAgent> agents;
  std::map<NodeId, std::size_t> index;
  for (NodeId n : tree.nodes()) {
    index[n] = agents.size();
    agents.emplace_back(n, tree, params, seed);
  }
  auto& ctrl = agents[index.at(tree.controller)];
  SigSlot last_done = -1;
  bool finished = false;
  for (SigSlot s = 0; s <= params.horizon; ++s) {
    std::vector<RadioEmission> em;
    std::vector<SignalingMessage> msgs;
    std::set<NodeId> transmitting;
    for (auto& a : agents) {
      auto m = a.transmit(s);
      if (!m) continue;
      transmitting.insert(a.id());
      em.push_back(RadioEmission{{a.id()}, params.w_s, static_cast<int>(msgs.size())});
      msgs.push_back(std::move(*m));
    }
    std::vector<NodeId> listeners;
    for (auto& a : agents)
      if (!transmitting.count(a.id())) listeners.push_back(a.id());
    std::vector<Reception> rx;
    if (!em.empty()) rx = radio.resolve(params.abs_offset + s, em, listeners);
    std::vector<std::set<NodeId>> got(msgs.size());
    for (const auto& r : rx) {
      if (r.emission < 0) continue;
      got[static_cast<std::size_t>(r.emission)].insert(r.listener);
      agents[index.at(r.listener)].on_receive(msgs[static_cast<std::size_t>(r.emission)], s);
    }
    res.messages_sent += static_cast<int>(msgs.size());
    if (params.record_trace) {
      for (std::size_t i = 0; i < msgs.size(); ++i) {
        TraceEvent e;
        e.slot = s;
        e.channel = params.w_s;
        e.sender = msgs[i].sender;
        e.kind = msgs[i].kind;
        std::ostringstream os;
        for (std::size_t k = 0; k < msgs[i].addressees.size(); ++k) {
          NodeId a = msgs[i].addressees[k];
          os << (k ? "," : "") << a << ':' << (got[i].count(a) ? "ok" : "lost");
        }
        e.outcome = os.str();
        e.detail = describe(msgs[i]);
        res.trace.push_back(e);
      }
    }
    for (auto& a : agents) a.on_slot_end(s);
    bool all_done = true;
    for (auto& a : agents)
      if (!a.done()) all_done = false;
    if (all_done) {
      last_done = s;
      finished = true;
      break;
    }
  }
  if (!finished) throw NonConvergence(params.horizon);
  res.terminate_slot = ctrl.terminate_slot();
  res.convergence_slots = std::max(res.terminate_slot, last_done) + 1;
  if (ctrl.audit() && ctrl.audit()->moved > 0) {
    // corrections are relayed hop by hop in DLS slots behind the TERMINATE
    res.convergence_slots += 3 * (tree.max_hops() - 1);
  }

  Schedule& sch = res.schedule;
  sch.dl_mode = params.dl_mode;
  sch.w_d = params.w_d;
  sch.w_u = params.w_u;
  if (!tree.is_leaf(tree.controller)) {
    sch.dl_slots[tree.controller] = ctrl.dl_alloc();
    sch.dl_groups[tree.controller] = downlink_groups(tree, tree.controller, params);
  }
  for (const auto& [child, par] : tree.parent) {
    const auto& pa = agents[index.at(par)];
    const auto& ca = agents[index.at(child)];
    auto ul = pa.child_ul().find(child);
    if (ul == pa.child_ul().end()) throw ProtocolViolation("no uplink record for node " + std::to_string(child));
    if (ul->second != ca.ul_alloc()) throw ProtocolViolation("uplink record mismatch at node " + std::to_string(child));
    sch.ul_slots[child] = ul->second;
    if (!tree.is_leaf(child)) {
      auto dl = pa.child_dl().find(child);
      if (dl == pa.child_dl().end()) throw ProtocolViolation("no downlink record for node " + std::to_string(child));
      sch.dl_slots[child] = dl->second;
      sch.dl_groups[child] = downlink_groups(tree, child, params);
    }
  }
  if (const auto& a = ctrl.audit()) {
    auto reported = ctrl.subtree_table();
    if (reported.dl_slots != sch.dl_slots || reported.ul_slots != sch.ul_slots)
      throw ProtocolViolation("audit table differs from the committed allocations");
    res.conflicts_found = ctrl.audit_conflicts();
    res.repaired_moves = a->moved;
    sch = a->schedule;
  }
  return res;
}

}  // namespace gallop
