#include "gallop/engine.hpp"

#include <algorithm>
#include <map>

namespace gallop {

DataPlane::DataPlane(const TreeTopology& tree, RadioEnvironment& radio, const RelayTable& relays)
    : tree_(tree), radio_(radio), relays_(relays) {}

ReceptionRecord DataPlane::fresh_record(const TreeTopology& tree) {
  ReceptionRecord r;
  r.has_command.insert(tree.controller);
  return r;
}

namespace {

bool contains(const std::vector<NodeId>& v, NodeId n) { return std::find(v.begin(), v.end(), n) != v.end(); }

}  // namespace

void DataPlane::run_frame(const Frame& f, long abs, bool gated, ReceptionRecord& rec, const ChannelPlan& plan,
                          long phase) {
  std::map<DataSlot, std::vector<const Transmission*>> by_slot;
  for (const auto& t : f.transmissions) by_slot[t.slot].push_back(&t);

  for (const auto& [slot, txs] : by_slot) {
    std::vector<RadioEmission> em;
    std::vector<const Transmission*> src;
    std::set<NodeId> sending;
    for (const auto* t : txs) {
      std::vector<NodeId> act;
      for (std::size_t i = 0; i < t->senders.size(); ++i) {
        NodeId s = t->senders[i];
        bool ok = false;
        switch (t->payload.kind) {
          case PayloadKind::Command: ok = rec.has_command.count(s) > 0; break;
          case PayloadKind::Control: ok = i == 0; break;
          case PayloadKind::Response:
            ok = i == 0 ? rec.holds(s, t->payload.origin) : rec.holds_any(s, t->payload.origin);
            break;
        }
        // handoffs are keyed by the payload origin (the target node for a command)
        if (ok && i > 0 && gated && !armed_.count({s, t->payload.origin})) ok = false;
        if (ok) act.push_back(s);
      }
      if (act.empty()) continue;
      sending.insert(act.begin(), act.end());
      em.push_back({act, plan.channel_for(t->channel, phase, abs + slot), static_cast<int>(src.size())});
      src.push_back(t);
    }
    if (em.empty()) continue;

    std::vector<NodeId> listeners;
    auto listen = [&](NodeId n) {
      if (!sending.count(n) && !contains(listeners, n)) listeners.push_back(n);
    };
    for (const auto* t : src) {
      for (NodeId r : t->receivers) listen(r);
      if (t->payload.kind == PayloadKind::Response)
        for (NodeId r : relays_.relays_of(t->senders[0], 2)) listen(r);  // relays overhear
    }
    auto rx = radio_.resolve(abs + slot, em, listeners);
    for (const auto& r : rx) {
      if (r.emission < 0) continue;
      const Transmission* t = src[static_cast<std::size_t>(r.emission)];
      NodeId l = r.listener;
      bool intended = contains(t->receivers, l);
      switch (t->payload.kind) {
        case PayloadKind::Command:
          if (intended) {
            rec.has_command.insert(l);
            if (l != tree_.controller) rec.held[l].insert(l);  // response created on arrival
          }
          break;
        case PayloadKind::Control:
          if (intended) armed_.insert({l, t->payload.origin});
          break;
        case PayloadKind::Response:
          if (intended)
            rec.held[l].insert(t->payload.origin);
          else
            rec.overheard[l].insert(t->payload.origin);
          break;
      }
    }
  }
}

void DataPlane::run_plan(const FramePlan& p, long abs, ReceptionRecord& rec, const ChannelPlan& plan, long phase) {
  for (const auto& tf : p.frames) run_frame(tf.frame, abs + tf.offset, false, rec, plan, phase++);
}

std::vector<GNack> DataPlane::deliver_gnacks(const std::vector<GNack>& g, const Schedule& s, long abs, Channel ch) {
  // every parent broadcasts its G-NACK in its first downlink slot, in slot order
  std::set<NodeId> informed{tree_.controller};
  std::vector<std::pair<DataSlot, NodeId>> order;
  for (const auto& [p, slots] : s.dl_slots)
    if (!slots.empty()) order.push_back({slots.front(), p});
  std::sort(order.begin(), order.end());
  std::set<std::pair<NodeId, NodeId>> heard;  // (issuer, child)
  for (const auto& [slot, p] : order) {
    if (!informed.count(p)) continue;
    const auto& kids = tree_.children_of(p);
    auto rx = radio_.resolve(abs + slot, {{{p}, ch, 0}}, kids);
    for (const auto& r : rx)
      if (r.emission == 0) {
        heard.insert({p, r.listener});
        informed.insert(r.listener);
      }
  }
  std::vector<GNack> out;
  for (const auto& x : g) {
    if (!informed.count(x.issuer)) continue;  // issuer never learned what is missing
    GNack y{x.issuer, {}};
    for (const auto& e : x.entries)
      if (heard.count({x.issuer, e.child})) y.entries.push_back(e);
    out.push_back(y);
  }
  return out;
}

CycleOutcome DataPlane::run_cycle(const Schedule& s, const EngineParams& p, long abs) {
  CycleOutcome out;
  out.expected = static_cast<int>(tree_.size()) - 1;
  ReceptionRecord rec = fresh_record(tree_);
  armed_.clear();

  FramePlan base;
  switch (p.technique) {
    case RetxTechnique::DuplicationOpt1: base = duplicate_schedule(s, tree_, 1, p.dup_rounds, p.channels); break;
    case RetxTechnique::DuplicationOpt2: base = duplicate_schedule(s, tree_, 2, p.dup_rounds, p.channels); break;
    default: base = base_cycle(s, tree_); break;
  }
  long phase = p.cycle_no * kPhasesPerCycle;
  run_plan(base, abs, rec, p.channels, phase);
  phase += static_cast<long>(base.frames.size());
  out.base_slots = base.length;
  long cursor = abs + base.length;

  bool retx = p.technique == RetxTechnique::RetxScheduling || p.technique == RetxTechnique::Extrapolation;
  for (int round = 0; retx && round < p.retx_rounds; ++round) {
    GNackMode mode = p.technique == RetxTechnique::Extrapolation ? GNackMode::Annotated : GNackMode::Plain;
    auto gn = ascertain_gnacks(rec, tree_, s, mode);
    if (!any_missing(gn)) break;
    if (p.lossy_gnack) gn = deliver_gnacks(gn, s, cursor, p.retx.w_d);
    if (!any_missing(gn)) break;
    armed_.clear();
    RetxPlan plan = p.technique == RetxTechnique::RetxScheduling
                        ? build_retx_schedule(gn, tree_, s, relays_, rec, p.retx)
                        : extrapolate_schedule(s, gn, tree_, relays_, rec, p.retx);
    int used = 0;
    if (p.technique == RetxTechnique::RetxScheduling) {
      long sig_start = cursor + plan.gnack_slots;
      auto sig = run_rs_signaling(plan, radio_, sig_start, p.channels.w_s, p.retx.horizon);
      long data = sig_start + sig.slots;
      for (const auto& tf : plan.frames) run_frame(tf.frame, data, true, rec, p.channels, phase++);
      used = plan.gnack_slots + sig.slots + plan.data_slots;
      out.trace.insert(out.trace.end(), sig.trace.begin(), sig.trace.end());
    } else {
      for (const auto& tf : plan.frames) run_frame(tf.frame, cursor + tf.offset, false, rec, p.channels, phase++);
      used = plan.length();
    }
    out.retx_slots += used;
    ++out.retx_phases;
    cursor += used;
    out.plans.push_back(std::move(plan));
  }

  for (NodeId n : tree_.nodes())
    if (n != tree_.controller && rec.holds(tree_.controller, n)) ++out.delivered;
  out.trace.push_back("cycle retx=" + to_string(p.technique) + " delivered=" + std::to_string(out.delivered) + "/" +
                      std::to_string(out.expected) + " base=" + std::to_string(out.base_slots) +
                      " retx=" + std::to_string(out.retx_slots));
  out.record = std::move(rec);
  return out;
}

}  // namespace gallop
