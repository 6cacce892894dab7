#include "gallop/retransmission.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gallop {

std::string to_string(RetxTechnique t) {
  switch (t) {
    case RetxTechnique::None: return "none";
    case RetxTechnique::DuplicationOpt1: return "dup1";
    case RetxTechnique::DuplicationOpt2: return "dup2";
    case RetxTechnique::RetxScheduling: return "retx-sched";
    case RetxTechnique::Extrapolation: return "extrapolate";
  }
  return "?";
}

RetxTechnique parse_retx_technique(const std::string& s) {
  for (auto t : {RetxTechnique::None, RetxTechnique::DuplicationOpt1, RetxTechnique::DuplicationOpt2,
                 RetxTechnique::RetxScheduling, RetxTechnique::Extrapolation})
    if (to_string(t) == s) return t;
  throw ConfigError("unknown retransmission technique '" + s + "'");
}

std::string to_string(RequestKind k) {
  switch (k) {
    case RequestKind::Buffered: return "buffered";
    case RequestKind::DownlinkRecovery: return "downlink-recovery";
    case RequestKind::Forward: return "forward";
  }
  return "?";
}

// ---------------------------------------------------------------------------

FramePlan base_cycle(const Schedule& s, const TreeTopology& tree) {
  FramePlan p;
  Frame dl = s.downlink_frame();
  Frame ul = s.uplink_frame(tree);
  dl.length = s.dl_span();
  ul.length = s.ul_span();
  p.frames.push_back({0, dl});
  p.frames.push_back({dl.length, ul});
  p.length = dl.length + ul.length;
  return p;
}

Channel duplicate_channel(Channel role, int round, const ChannelPlan& plan) {
  if (round == 0) return role;
  return (role + 4 * round) % plan.n_channels;
}

FramePlan duplicate_schedule(const Schedule& s, const TreeTopology& tree, int option, int rounds,
                             const ChannelPlan& plan) {
  if (option != 1 && option != 2) throw ConfigError("duplication option must be 1 or 2");
  if (rounds < 0) throw ConfigError("duplication rounds must be >= 0");
  FramePlan base = base_cycle(s, tree);
  if (rounds == 0) return base;
  FramePlan out;
  if (option == 1) {
    int stride = base.length + 1;  // one switching slot between rounds
    for (int k = 0; k <= rounds; ++k)
      for (const auto& tf : base.frames) {
        TimedFrame c = tf;
        c.offset += k * stride;
        for (auto& t : c.frame.transmissions) t.channel = duplicate_channel(t.channel, k, plan);
        out.frames.push_back(c);
      }
    out.length = (rounds + 1) * base.length + rounds;
    return out;
  }
  const int m = rounds + 1;
  int offset = 0;
  for (const auto& tf : base.frames) {
    TimedFrame c;
    c.offset = offset;
    c.frame.kind = tf.frame.kind;
    c.frame.length = tf.frame.length * m;
    for (const auto& t : tf.frame.transmissions)
      for (int j = 0; j < m; ++j) {
        Transmission d = t;
        d.slot = t.slot * m + j;
        d.channel = duplicate_channel(t.channel, j, plan);
        c.frame.transmissions.push_back(d);
      }
    std::stable_sort(c.frame.transmissions.begin(), c.frame.transmissions.end(),
                     [](const Transmission& a, const Transmission& b) { return a.slot < b.slot; });
    offset += c.frame.length;
    out.frames.push_back(c);
  }
  out.length = offset;
  return out;
}

// ---------------------------------------------------------------------------

bool ReceptionRecord::holds(NodeId n, NodeId origin) const {
  auto it = held.find(n);
  return it != held.end() && it->second.count(origin);
}

bool ReceptionRecord::holds_any(NodeId n, NodeId origin) const {
  if (holds(n, origin)) return true;
  auto it = overheard.find(n);
  return it != overheard.end() && it->second.count(origin);
}

ReceptionRecord ReceptionRecord::complete(const TreeTopology& tree) {
  ReceptionRecord r;
  for (NodeId n : tree.nodes()) {
    r.has_command.insert(n);
    if (n == tree.controller) continue;
    for (NodeId o : tree.uplink_order(n)) r.held[n].insert(o);
  }
  for (NodeId n : tree.nodes())
    if (n != tree.controller) r.held[tree.controller].insert(n);
  return r;
}

namespace {

// Child of p whose subtree holds origin o.
NodeId child_towards(const TreeTopology& tree, NodeId p, NodeId o) {
  for (NodeId c : tree.children_of(p))
    if (tree.in_subtree(c, o)) return c;
  return 0;
}

int ordinal_of(const TreeTopology& tree, NodeId c, NodeId o) {
  auto order = tree.uplink_order(c);
  auto it = std::find(order.begin(), order.end(), o);
  return it == order.end() ? 0 : static_cast<int>(it - order.begin()) + 1;
}

DataSlot slot_of(const Schedule& s, NodeId c, int ordinal) {
  auto it = s.ul_slots.find(c);
  if (it == s.ul_slots.end() || ordinal < 1 || static_cast<std::size_t>(ordinal) > it->second.size()) return -1;
  return it->second[static_cast<std::size_t>(ordinal - 1)];
}

const GNack* find_gnack(const std::vector<GNack>& g, NodeId issuer) {
  for (const auto& x : g)
    if (x.issuer == issuer) return &x;
  return nullptr;
}

// Origins the parent of c asks c for, in ordinal order.
std::vector<NodeId> asked_of(const std::vector<GNack>& g, const TreeTopology& tree, NodeId c) {
  std::vector<NodeId> out;
  if (c == tree.controller) return out;
  const GNack* pg = find_gnack(g, tree.parent.at(c));
  if (!pg) return out;
  auto order = tree.uplink_order(c);
  for (const auto& e : pg->entries)
    if (e.child == c && e.ordinal >= 1 && static_cast<std::size_t>(e.ordinal) <= order.size())
      out.push_back(order[static_cast<std::size_t>(e.ordinal - 1)]);
  return out;
}

}  // namespace

std::vector<GNack> ascertain_gnacks(const ReceptionRecord& rec, const TreeTopology& tree, const Schedule& s,
                                    GNackMode mode) {
  std::vector<GNack> out;
  auto annotate = [&](GNackEntry e) {
    if (mode == GNackMode::Annotated) e.original_slot = slot_of(s, e.child, e.ordinal);
    return e;
  };
  GNack root{tree.controller, {}};
  for (NodeId c : tree.children_of(tree.controller)) {
    auto order = tree.uplink_order(c);
    for (std::size_t i = 0; i < order.size(); ++i)
      if (!rec.holds(tree.controller, order[i])) root.entries.push_back(annotate({c, static_cast<int>(i) + 1}));
  }
  out.push_back(root);
  for (NodeId p : tree.bfs_order()) {
    if (p == tree.controller || tree.is_leaf(p)) continue;
    GNack g{p, {}};
    for (NodeId o : asked_of(out, tree, p)) {
      if (rec.holds(p, o) || o == p) continue;  // served from the buffer, or own packet
      NodeId c = child_towards(tree, p, o);
      if (c) g.entries.push_back(annotate({c, ordinal_of(tree, c, o)}));
    }
    out.push_back(g);
  }
  return out;
}

bool any_missing(const std::vector<GNack>& g) {
  for (const auto& x : g)
    if (!x.empty()) return true;
  return false;
}

// ---------------------------------------------------------------------------

std::optional<NodeId> RelayTable::relay_of(NodeId n) const {
  auto it = relay.find(n);
  if (it == relay.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> RelayTable::relays_of(NodeId n, int budget) const {
  std::vector<NodeId> out;
  if (auto it = relay.find(n); it != relay.end()) out.push_back(it->second);
  if (budget >= 2)
    if (auto it = relay2.find(n); it != relay2.end() && (out.empty() || it->second != out[0])) out.push_back(it->second);
  return out;
}

namespace {

void insert_nt(std::vector<NtEntry>& nt, NtEntry e, int n_b) {
  for (auto& x : nt)
    if (x.neighbor == e.neighbor) {
      x.snr_db = std::max(x.snr_db, e.snr_db);
      e.neighbor = 0;
    }
  if (e.neighbor) nt.push_back(e);
  std::stable_sort(nt.begin(), nt.end(), [](const NtEntry& a, const NtEntry& b) {
    return a.snr_db != b.snr_db ? a.snr_db > b.snr_db : a.neighbor < b.neighbor;
  });
  if (static_cast<int>(nt.size()) > n_b) nt.resize(static_cast<std::size_t>(n_b));
}

// Relay of c = sibling whose table holds c with the highest SNR; second-best kept too.
void compute_rt(const TreeTopology& tree, NodeId p, RelayTable& rt) {
  const auto& kids = tree.children_of(p);
  for (NodeId c : kids) {
    std::vector<std::pair<double, NodeId>> cand;
    for (NodeId x : kids) {
      if (x == c) continue;
      auto it = rt.nt.find(x);
      if (it == rt.nt.end()) continue;
      for (const auto& e : it->second)
        if (e.neighbor == c) cand.push_back({e.snr_db, x});
    }
    std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    if (!cand.empty()) rt.relay[c] = cand[0].second;
    if (cand.size() > 1) rt.relay2[c] = cand[1].second;
  }
}

// Polling procedure below p starting at slot t; returns the slot after p's branch finished.
long poll_branch(const TreeTopology& tree, const LinkProbe& probe, const RelayParams& prm, NodeId p, long t,
                 RelayTable& rt) {
  const auto& kids = tree.children_of(p);
  if (kids.empty()) return t;
  auto log = [&](long s, const std::string& what) {
    rt.trace.push_back("relay-select s" + std::to_string(s) + " " + std::to_string(p) + " " + what);
  };
  for (NodeId c : kids) {
    for (int attempt = 0; attempt < prm.max_polls; ++attempt) {
      bool rfs = probe(p, c, t).has_value();
      long asgn = t + 1;
      t += 2;
      if (!rfs) continue;
      // siblings in range overhear the empty ASGN
      for (NodeId x : kids)
        if (x != c && tree.in_range(c, x))
          if (auto snr = probe(c, x, asgn)) insert_nt(rt.nt[x], {c, *snr}, prm.n_b);
      if (probe(c, p, asgn)) {
        log(asgn, "polled " + std::to_string(c));
        break;
      }
    }
  }
  ++t;  // DLS with the report schedule
  for (NodeId c : kids) {
    for (int attempt = 0; attempt < prm.max_polls; ++attempt) {
      bool ok = probe(c, p, t).has_value();
      ++t;
      if (ok) break;
      if (attempt + 1 == prm.max_polls) rt.nt.erase(c);  // report never arrived
    }
  }
  compute_rt(tree, p, rt);
  std::set<NodeId> missing(kids.begin(), kids.end());
  for (int attempt = 0; attempt < prm.max_polls && !missing.empty(); ++attempt) {
    for (auto it = missing.begin(); it != missing.end();)
      it = probe(p, *it, t) ? missing.erase(it) : std::next(it);
    ++t;
  }
  log(t, "relay table broadcast");
  // child branches run in parallel on orthogonal channels; leaves notify at once
  long end = t;
  for (NodeId c : kids) {
    long branch = tree.is_leaf(c) ? t : poll_branch(tree, probe, prm, c, t, rt);
    end = std::max(end, branch + 1);  // completion notice to p
  }
  return end;
}

}  // namespace

RelayTable select_relays(const TreeTopology& tree, const LinkProbe& probe, const RelayParams& p) {
  if (p.n_b < 1) throw ConfigError("N_b must be >= 1");
  RelayTable rt;
  if (p.mode == RelayMode::Polling) {
    rt.signaling_slots = static_cast<int>(poll_branch(tree, probe, p, tree.controller, 0, rt));
    return rt;
  }
  // online: average overheard SNR over a number of data phases
  long slot = 0;
  for (NodeId par : tree.nodes()) {
    const auto& kids = tree.children_of(par);
    for (NodeId c : kids)
      for (NodeId x : kids) {
        if (x == c || !tree.in_range(c, x)) continue;
        double sum = 0;
        int heard = 0;
        for (int k = 0; k < p.online_phases; ++k)
          if (auto snr = probe(c, x, slot + k)) {
            sum += *snr;
            ++heard;
          }
        if (heard * 2 >= p.online_phases && heard > 0 && sum / heard >= p.threshold_db)
          insert_nt(rt.nt[x], {c, sum / heard}, p.n_b);
      }
    slot += p.online_phases;
    compute_rt(tree, par, rt);
  }
  return rt;
}

RelayTable select_relays(const TreeTopology& tree, RadioEnvironment& radio, const RelayParams& p, long start,
                         Channel ch) {
  LinkProbe probe = [&](NodeId tx, NodeId rx, long s) -> std::optional<double> {
    auto r = radio.resolve(start + s, {{{tx}, ch, 0}}, {rx});
    if (r.empty() || r[0].emission != 0) return std::nullopt;
    return radio.link_snr_db(tx, rx, start + s, ch);
  };
  return select_relays(tree, probe, p);
}

RelayTable static_relays(const TreeTopology& tree, const std::map<NodeId, NodeId>& relay) {
  RelayTable rt;
  for (const auto& [n, r] : relay) {
    if (n == tree.controller || r == tree.controller || tree.parent.at(n) != tree.parent.at(r))
      throw InconsistentSpec("relay " + std::to_string(r) + " is not a sibling of " + std::to_string(n));
    rt.relay[n] = r;
  }
  return rt;
}

// ---------------------------------------------------------------------------

double combined_snr_db(std::optional<double> a, std::optional<double> b, CombiningMode m) {
  if (!a && !b) return -std::numeric_limits<double>::infinity();
  if (!a) return *b;
  if (!b) return *a;
  if (m == CombiningMode::Selection) return std::max(*a, *b);
  return lin_to_db(db_to_lin(*a) + db_to_lin(*b));
}

bool cooperative_success(std::optional<double> a, std::optional<double> b, CoopMode mode, const CoopParams& p,
                         bool receiver_has_apriori) {
  if (mode == CoopMode::CI) return combined_snr_db(a, b, p.combining) >= p.threshold_db;
  if (!receiver_has_apriori || !b) return false;
  return *b + p.snc_gain_db >= p.threshold_db;
}

// ---------------------------------------------------------------------------

namespace {

struct FrameBuilder {
  const TreeTopology& tree;
  Frame frame;

  bool fits(const Transmission& t) const {
    Frame f;
    f.kind = frame.kind;
    for (const auto& x : frame.transmissions)
      if (x.slot == t.slot) f.transmissions.push_back(x);
    f.transmissions.push_back(t);
    return verify_frame(f, tree).empty();
  }
  DataSlot place(Transmission t, DataSlot lb) {
    for (t.slot = std::max(lb, 0);; ++t.slot)
      if (fits(t)) break;
    frame.transmissions.push_back(t);
    frame.length = std::max(frame.length, t.slot + 1);
    return t.slot;
  }
  // Adds relays one by one to transmission i while its slot stays conflict-free.
  void add_relays_at(std::size_t i, const std::vector<NodeId>& relays) {
    for (NodeId r : relays) {
      Transmission c = frame.transmissions[i];
      if (std::find(c.senders.begin(), c.senders.end(), r) != c.senders.end()) continue;
      if (std::find(c.receivers.begin(), c.receivers.end(), r) != c.receivers.end()) continue;
      c.senders.push_back(r);
      Frame f;
      f.kind = frame.kind;
      for (std::size_t j = 0; j < frame.transmissions.size(); ++j)
        if (j != i && frame.transmissions[j].slot == c.slot) f.transmissions.push_back(frame.transmissions[j]);
      f.transmissions.push_back(c);
      if (verify_frame(f, tree).empty()) frame.transmissions[i] = c;
    }
  }
  void sort() {
    std::stable_sort(frame.transmissions.begin(), frame.transmissions.end(),
                     [](const Transmission& a, const Transmission& b) { return a.slot < b.slot; });
  }
};

}  // namespace

RetxPlan build_retx_schedule(const std::vector<GNack>& gnacks, const TreeTopology& tree, const Schedule& s,
                             const RelayTable& relays, const ReceptionRecord& rec, const RetxParams& p) {
  RetxPlan plan;
  plan.technique = RetxTechnique::RetxScheduling;
  plan.relay_budget = p.relay_budget;
  plan.relays_need_handoff = true;
  if (!any_missing(gnacks)) return plan;

  FrameBuilder fb{tree, {}};
  fb.frame.kind = FrameKind::Retransmission;
  std::map<std::pair<NodeId, NodeId>, DataSlot> ready;  // (node, origin) -> slot it receives it
  std::map<NodeId, DataSlot> cmd_ready;                 // node -> slot it receives the command

  auto tx = [&](std::vector<NodeId> snd, std::vector<NodeId> rcv, PayloadKind k, NodeId origin) {
    Transmission t;
    t.channel = p.w_r;
    t.senders = std::move(snd);
    t.receivers = std::move(rcv);
    t.payload = {k, origin};
    return t;
  };
  auto holding = [&](const std::vector<NodeId>& rs, NodeId o, bool command) {
    std::vector<NodeId> out;
    for (NodeId r : rs)
      if (command ? rec.has_command.count(r) > 0 : rec.holds_any(r, o)) out.push_back(r);
    return out;
  };

  std::function<void(NodeId)> visit = [&](NodeId x) {
    auto asked = asked_of(gnacks, tree, x);
    const GNack* own = find_gnack(gnacks, x);
    if (asked.empty() && (!own || own->empty())) return;
    NodeId par = tree.parent.at(x);
    auto rel = relays.relays_of(x, p.relay_budget);
    std::vector<NodeId> forward;
    for (NodeId o : asked) {
      if (rec.holds(x, o)) {
        RetxRequest r{x, par, RequestKind::Buffered, {o}, {}, -1, -1};
        DataSlot lb = 0;
        if (!rel.empty()) {
          lb = fb.place(tx({par}, rel, PayloadKind::Control, o), lb) + 1;
          r.slots.push_back(lb - 1);
          auto eng = holding(rel, o, false);
          for (NodeId rr : rel) {
            Transmission c = tx({x}, {par}, PayloadKind::Response, o);
            if (std::find(eng.begin(), eng.end(), rr) != eng.end()) c.senders.push_back(rr);
            lb = fb.place(c, lb) + 1;
            r.slots.push_back(lb - 1);
          }
        } else {
          lb = fb.place(tx({x}, {par}, PayloadKind::Response, o), lb) + 1;
          r.slots.push_back(lb - 1);
        }
        ready[{par, o}] = lb - 1;
        plan.requests.push_back(r);
      } else if (o == x) {
        RetxRequest r{x, par, RequestKind::DownlinkRecovery, {x}, {}, -1, -1};
        DataSlot lb = 0;
        if (auto it = cmd_ready.find(par); it != cmd_ready.end()) lb = it->second + 1;
        if (!rel.empty()) {
          DataSlot h = fb.place(tx({par}, rel, PayloadKind::Control, x), lb);
          r.slots.push_back(h);
          lb = h + 1;
        }
        std::vector<NodeId> snd{par};
        for (NodeId rr : holding(rel, 0, true)) snd.push_back(rr);
        DataSlot c = fb.place(tx(snd, {x}, PayloadKind::Command, x), lb);
        r.slots.push_back(c);
        cmd_ready[x] = c;
        DataSlot u = fb.place(tx({x}, {par}, PayloadKind::Response, x), c + 1);
        r.slots.push_back(u);
        ready[{par, x}] = u;
        plan.requests.push_back(r);
      } else {
        forward.push_back(o);
      }
    }
    for (NodeId c : tree.children_of(x)) visit(c);
    if (!forward.empty()) {
      RetxRequest r{x, par, RequestKind::Forward, forward, {}, -1, -1};
      for (NodeId o : forward) {
        auto it = ready.find({x, o});
        if (it == ready.end()) continue;  // not recoverable in this phase
        DataSlot t = fb.place(tx({x}, {par}, PayloadKind::Response, o), it->second + 1);
        r.slots.push_back(t);
        ready[{par, o}] = t;
      }
      if (!r.slots.empty()) plan.requests.push_back(r);
    }
  };
  for (NodeId c : tree.children_of(tree.controller)) visit(c);

  for (std::size_t k = 0; k < plan.requests.size(); ++k) {
    plan.requests[k].rfs_slot = static_cast<int>(2 * k);
    plan.requests[k].asgn_slot = static_cast<int>(2 * k + 1);
  }
  fb.sort();
  plan.gnack_slots = s.dl_span();
  plan.signaling_slots = plan.requests.empty() ? 0 : static_cast<int>(2 * plan.requests.size() + 1);
  plan.data_slots = fb.frame.length;
  if (!fb.frame.transmissions.empty()) plan.frames.push_back({plan.gnack_slots + plan.signaling_slots, fb.frame});
  if (plan.length() > p.horizon) throw RetxNonConvergence(p.horizon);
  return plan;
}

RetxPlan extrapolate_schedule(const Schedule& s, const std::vector<GNack>& gnacks, const TreeTopology& tree,
                              const RelayTable& relays, const ReceptionRecord& rec, const RetxParams& p) {
  RetxPlan plan;
  plan.technique = RetxTechnique::Extrapolation;
  plan.relay_budget = p.relay_budget;
  if (!any_missing(gnacks)) return plan;

  // downlink part: commands re-sent to nodes that lack them, with their relays
  FrameBuilder dl{tree, {}};
  dl.frame.kind = FrameKind::Downlink;
  Frame base_dl = s.downlink_frame();
  std::vector<std::vector<NodeId>> dl_help;
  for (auto t : base_dl.transmissions) {
    std::vector<NodeId> need;
    for (NodeId r : t.receivers)
      if (!rec.has_command.count(r)) need.push_back(r);
    if (need.empty()) continue;
    t.receivers = need;
    t.channel = p.w_d;
    std::vector<NodeId> helpers;
    for (NodeId r : need)
      for (NodeId rr : relays.relays_of(r, p.relay_budget))
        if (rec.has_command.count(rr)) helpers.push_back(rr);
    dl.frame.transmissions.push_back(t);
    dl_help.push_back(helpers);
  }
  // relays join only after every source is in place
  for (std::size_t i = 0; i < dl_help.size(); ++i) dl.add_relays_at(i, dl_help[i]);

  // uplink part: every annotated slot, source plus relays that hold the packet
  FrameBuilder ul{tree, {}};
  ul.frame.kind = FrameKind::Uplink;
  std::vector<std::vector<NodeId>> ul_help;
  for (const auto& g : gnacks)
    for (const auto& e : g.entries) {
      DataSlot t = e.original_slot >= 0 ? e.original_slot : slot_of(s, e.child, e.ordinal);
      auto order = tree.uplink_order(e.child);
      if (t < 0 || e.ordinal < 1 || static_cast<std::size_t>(e.ordinal) > order.size()) continue;
      NodeId o = order[static_cast<std::size_t>(e.ordinal - 1)];
      Transmission x;
      x.slot = t;
      x.channel = p.w_u;
      x.senders = {e.child};
      x.receivers = {g.issuer};
      x.payload = {PayloadKind::Response, o};
      std::vector<NodeId> helpers;
      for (NodeId rr : relays.relays_of(e.child, p.relay_budget))
        if (rec.holds_any(rr, o)) helpers.push_back(rr);
      ul.frame.transmissions.push_back(x);
      ul_help.push_back(helpers);
    }
  for (std::size_t i = 0; i < ul_help.size(); ++i) ul.add_relays_at(i, ul_help[i]);
  dl.sort();
  ul.sort();

  auto compress = [](Frame& f) {
    std::map<DataSlot, DataSlot> remap;
    for (const auto& t : f.transmissions) remap.emplace(t.slot, 0);
    DataSlot k = 0;
    for (auto& kv : remap) kv.second = k++;
    for (auto& t : f.transmissions) t.slot = remap[t.slot];
    f.length = k;
  };
  if (p.extrapolation_silent) {
    dl.frame.length = s.dl_span();
    ul.frame.length = s.ul_span();
  } else {
    compress(dl.frame);
    compress(ul.frame);
  }
  // the G-NACKs ride on the downlink part, which therefore always runs
  plan.gnack_slots = 0;
  plan.signaling_slots = 0;
  if (p.extrapolation_silent || !dl.frame.transmissions.empty()) {
    int dl_len = p.extrapolation_silent ? s.dl_span() : std::max(dl.frame.length, s.dl_span());
    dl.frame.length = dl_len;
    plan.frames.push_back({0, dl.frame});
    plan.frames.push_back({dl_len, ul.frame});
    plan.data_slots = dl_len + ul.frame.length;
  } else {
    plan.gnack_slots = s.dl_span();
    plan.frames.push_back({plan.gnack_slots, ul.frame});
    plan.data_slots = ul.frame.length;
  }
  return plan;
}

std::vector<Conflict> verify_plan(const RetxPlan& plan, const TreeTopology& tree) {
  std::vector<Conflict> out;
  for (const auto& tf : plan.frames) {
    auto c = verify_frame(tf.frame, tree);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

std::vector<Conflict> verify_plan(const FramePlan& plan, const TreeTopology& tree) {
  std::vector<Conflict> out;
  for (const auto& tf : plan.frames) {
    auto c = verify_frame(tf.frame, tree);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

RsSignalingResult run_rs_signaling(const RetxPlan& plan, RadioEnvironment& radio, long abs_start, Channel w_s,
                                   int horizon) {
  RsSignalingResult res;
  if (plan.requests.empty()) return res;
  long s = 0;
  auto heard = [&](NodeId tx, NodeId rx, long slot) {
    auto r = radio.resolve(abs_start + slot, {{{tx}, w_s, 0}}, {rx});
    return !r.empty() && r[0].emission == 0;
  };
  for (const auto& rq : plan.requests) {
    while (true) {
      if (s + 1 >= horizon) throw RetxNonConvergence(horizon);
      ++res.attempts;
      bool rfs = heard(rq.requester, rq.granter, s);
      bool asgn = rfs && heard(rq.granter, rq.requester, s + 1);
      res.trace.push_back("rs s" + std::to_string(s) + " " + std::to_string(rq.requester) + "->" +
                          std::to_string(rq.granter) + " " + to_string(rq.kind) + (asgn ? " ok" : " lost"));
      s += 2;
      if (asgn) break;
    }
  }
  res.slots = static_cast<int>(s) + 1;  // TERMINATE after the final ASGN
  return res;
}

}  // namespace gallop
