#include "gallop/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gallop {

double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
double lin_to_db(double lin) {
  return lin > 0 ? 10.0 * std::log10(lin) : -std::numeric_limits<double>::infinity();
}

double LinkModelParams::noise_power_dbm() const { return noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz); }

void LinkModelParams::validate() const {
  if (bandwidth_hz <= 0) throw ConfigError("bandwidth must be positive");
  if (d0_m <= 0) throw ConfigError("d0 must be positive");
  if (path_loss_exponent <= 0) throw ConfigError("path loss exponent must be positive");
}

double path_loss_db(double d, const LinkModelParams& p) {
  if (!(d > 0)) throw NonpositiveDistance("path_loss_db: distance must be > 0");
  return p.pl_d0_db + 10.0 * p.path_loss_exponent * std::log10(d / p.d0_m);
}

double mean_snr_db(double d, const LinkModelParams& p) {
  return p.tx_power_dbm - path_loss_db(d, p) - p.noise_power_dbm();
}

double snr_db_with_gain(double d, const LinkModelParams& p, double gain) {
  return mean_snr_db(d, p) + lin_to_db(gain);
}

double sample_link_snr_db(double d, const LinkModelParams& p, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  return snr_db_with_gain(d, p, e(rng));
}

double outage_zeta(const LinkModelParams& p) {
  // mean SNR (linear) = G * d^-alpha with G = Pt * 10^(-PL(d0)/10) * d0^alpha / sigma^2
  double g_db = p.tx_power_dbm - p.pl_d0_db - p.noise_power_dbm() +
                10.0 * p.path_loss_exponent * std::log10(p.d0_m);
  return db_to_lin(p.snr_threshold_db - g_db);
}

double rayleigh_outage(double d, const LinkModelParams& p) {
  return 1.0 - std::exp(-db_to_lin(p.snr_threshold_db - mean_snr_db(d, p)));
}

double sinr_db(double signal_dbm, const SinrContext& ctx) {
  double den = db_to_lin(ctx.noise_dbm);
  for (double i : ctx.interferer_dbm) den += db_to_lin(i);
  return signal_dbm - lin_to_db(den);
}

bool transmission_success(double snr_db, const SinrContext& ctx) {
  return sinr_db(snr_db + ctx.noise_dbm, ctx) >= ctx.threshold_db;
}

// ---- interference --------------------------------------------------------

InterferenceScenario InterferenceScenario::none() { return {}; }

InterferenceScenario InterferenceScenario::low() {
  InterferenceScenario s;
  s.enabled = true;
  s.aps_min = s.aps_max = 1;
  s.ap_tx_power_dbm = 14.0;
  s.mu_on_ms = 0.25;
  s.mu_off_ms = 0.5;
  s.channel_overlap = 0.03;
  return s;
}

InterferenceScenario InterferenceScenario::high() {
  InterferenceScenario s;
  s.enabled = true;
  s.aps_min = 1;
  s.aps_max = 3;
  s.ap_tx_power_dbm = 20.0;
  s.mu_on_ms = 1.5;
  s.mu_off_ms = 0.5;
  s.channel_overlap = 0.1;
  return s;
}

void InterferenceScenario::validate() const {
  if (!enabled) return;
  if (mu_on_ms <= 0 || mu_off_ms <= 0) throw ConfigError("interference: mu_on and mu_off must be positive");
  if (ap_distance_min_m <= 0 || ap_distance_max_m < ap_distance_min_m)
    throw ConfigError("interference: invalid AP distance range");
  if (aps_min < 0 || aps_max < aps_min) throw ConfigError("interference: invalid AP count range");
  if (channel_overlap < 0 || channel_overlap > 1) throw ConfigError("interference: overlap must be in [0,1]");
}

OnOffProcess::OnOffProcess(double mu_on_ms, double mu_off_ms, std::uint64_t seed)
    : mu_on_(mu_on_ms), mu_off_(mu_off_ms), seed_(seed) {
  initial_on_ = unit_open(hash_words({seed_, 0xface})) < mu_on_ / (mu_on_ + mu_off_);
}

void OnOffProcess::extend(double t_ms) {
  double last = switches_.empty() ? 0.0 : switches_.back();
  while (switches_.empty() || last <= t_ms) {
    bool on_now = initial_on_ ^ (switches_.size() % 2 == 1);
    // memoryless: the residual of the initial period has the same law as a full period
    double dur = exponential_from_hash(hash_words({seed_, draws_++}), on_now ? mu_on_ : mu_off_);
    last += dur;
    switches_.push_back(last);
  }
}

InterferenceState OnOffProcess::state(double t_ms) {
  if (t_ms < 0) t_ms = 0;
  extend(t_ms);
  auto idx = static_cast<std::size_t>(std::upper_bound(switches_.begin(), switches_.end(), t_ms) - switches_.begin());
  bool on_now = initial_on_ ^ (idx % 2 == 1);
  return on_now ? InterferenceState::On : InterferenceState::Off;
}

InterferenceState interference_state(OnOffProcess& ap, double t_ms) { return ap.state(t_ms); }

// ---- channel plan --------------------------------------------------------

void ChannelPlan::validate() const {
  if (n_channels <= 0) throw ConfigError("channel plan: n_channels must be positive");
  for (Channel c : {w_d, w_u, w_s, w_r})
    if (c < 0 || c >= n_channels) throw ConfigError("channel plan: role index out of range");
  if (mode == HoppingMode::None) {
    std::set<Channel> s{w_d, w_u, w_s, w_r};
    if (s.size() != 4) throw ConfigError("channel plan: roles must be distinct without hopping");
  }
}

Channel hop(long ap_no, const ChannelPlan& plan) {
  long n = plan.n_channels;
  long v = (ap_no + plan.channel_offset) % n;
  if (v < 0) v += n;
  return static_cast<Channel>(v);
}

Channel ChannelPlan::channel_for(Channel role, long phase_no, long abs_slot) const {
  switch (mode) {
    case HoppingMode::None: return role;
    case HoppingMode::PhaseSlotted: {
      ChannelPlan p = *this;
      p.channel_offset = channel_offset + role;
      return hop(phase_no, p);
    }
    case HoppingMode::TimeSlotted: {
      ChannelPlan p = *this;
      p.channel_offset = channel_offset + role;
      return hop(abs_slot, p);
    }
  }
  return role;
}

// ---- radio environment ---------------------------------------------------

RadioEnvironment::RadioEnvironment(const TreeTopology& tree, LinkModelParams link, InterferenceScenario intf,
                                   LinkMode mode, std::uint64_t seed)
    : tree_(tree), link_(link), intf_(intf), mode_(mode), seed_(seed) {
  link_.validate();
  intf_.validate();
  noise_mw_ = db_to_lin(link_.noise_power_dbm());
}

double RadioEnvironment::rx_power_dbm(NodeId tx, NodeId rx, long abs_slot, Channel ch) const {
  double d = tree_.link_distance(tx, rx);
  double gain = exponential_from_hash(
      hash_words({seed_, 0xfade, tx, rx, static_cast<std::uint64_t>(abs_slot), static_cast<std::uint64_t>(ch)}));
  return link_.tx_power_dbm - path_loss_db(d, link_) + lin_to_db(gain);
}

double RadioEnvironment::link_snr_db(NodeId tx, NodeId rx, long abs_slot, Channel ch) const {
  return rx_power_dbm(tx, rx, abs_slot, ch) - link_.noise_power_dbm();
}

std::vector<AccessPoint>& RadioEnvironment::aps_for(NodeId tx, NodeId rx) {
  auto key = granularity == InterferenceGranularity::PerLink ? std::make_pair(tx, rx) : std::make_pair(NodeId{0}, rx);
  auto it = aps_.find(key);
  if (it != aps_.end()) return it->second;
  std::vector<AccessPoint> v;
  std::uint64_t base = hash_words({seed_, 0xa9, key.first, key.second});
  int span = intf_.aps_max - intf_.aps_min + 1;
  int n = intf_.aps_min + static_cast<int>(unit_open(hash_words({base, 1})) * span);
  n = std::min(n, intf_.aps_max);
  for (int i = 0; i < n; ++i) {
    AccessPoint ap;
    double u = unit_open(hash_words({base, 2, static_cast<std::uint64_t>(i)}));
    ap.distance_m = intf_.ap_distance_min_m + u * (intf_.ap_distance_max_m - intf_.ap_distance_min_m);
    ap.process = std::make_unique<OnOffProcess>(intf_.mu_on_ms, intf_.mu_off_ms,
                                                hash_words({base, 3, static_cast<std::uint64_t>(i)}));
    ap.overlap_seed = hash_words({base, 4, static_cast<std::uint64_t>(i)});
    v.push_back(std::move(ap));
  }
  return aps_.emplace(key, std::move(v)).first->second;
}

double RadioEnvironment::external_interference_mw(NodeId tx, NodeId rx, long abs_slot, Channel ch) {
  if (!intf_.enabled) return 0.0;
  double t_ms = (static_cast<double>(abs_slot) + 0.5) * slot_ms;
  double sum = 0.0;
  for (auto& ap : aps_for(tx, rx)) {
    if (unit_open(hash_words({ap.overlap_seed, static_cast<std::uint64_t>(ch)})) >= intf_.channel_overlap) continue;
    if (!ap.process->on(t_ms)) continue;
    sum += db_to_lin(intf_.ap_tx_power_dbm - path_loss_db(ap.distance_m, link_));
  }
  return sum;
}

std::vector<Reception> RadioEnvironment::resolve(long abs_slot, const std::vector<RadioEmission>& emissions,
                                                 const std::vector<NodeId>& listeners) {
  std::vector<Reception> out;
  out.reserve(listeners.size());
  const double beta = link_.snr_threshold_db;
  for (NodeId l : listeners) {
    Reception r;
    r.listener = l;
    // candidates = emissions with at least one in-range sender
    std::vector<int> cand;
    for (int i = 0; i < static_cast<int>(emissions.size()); ++i) {
      const auto& e = emissions[static_cast<std::size_t>(i)];
      for (NodeId s : e.senders)
        if (s != l && tree_.in_range(s, l)) {
          cand.push_back(i);
          break;
        }
    }
    if (cand.empty()) {
      out.push_back(r);
      continue;
    }
    auto scripted_out = [&](const RadioEmission& e) {
      for (NodeId s : e.senders)
        if (tree_.in_range(s, l) && !script.drops(abs_slot, s, l)) return false;
      return true;
    };
    if (mode_ == LinkMode::Perfect) {
      if (cand.size() == 1 && !scripted_out(emissions[static_cast<std::size_t>(cand[0])])) {
        r.emission = cand[0];
        r.sinr_db = std::numeric_limits<double>::infinity();
      }
      out.push_back(r);
      continue;
    }
    // received powers per (emission, sender) with the emission's channel
    std::vector<std::vector<std::pair<NodeId, double>>> pw(cand.size());
    double total_mw = 0.0;
    for (std::size_t k = 0; k < cand.size(); ++k) {
      const auto& e = emissions[static_cast<std::size_t>(cand[k])];
      for (NodeId s : e.senders) {
        if (s == l || !tree_.in_range(s, l)) continue;
        double mw = db_to_lin(rx_power_dbm(s, l, abs_slot, e.channel));
        pw[k].push_back({s, mw});
        total_mw += mw;
      }
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cand.size(); ++k) {
      const auto& e = emissions[static_cast<std::size_t>(cand[k])];
      if (scripted_out(e)) continue;
      double own = 0.0;
      for (auto& sp : pw[k]) own += sp.second;
      double co = total_mw - own;
      double combined = 0.0;
      for (auto& [s, mw] : pw[k]) {
        if (script.drops(abs_slot, s, l)) continue;
        double link_sinr = mw / (noise_mw_ + co + external_interference_mw(s, l, abs_slot, e.channel));
        combined = combining == CombiningMode::PowerSum ? combined + link_sinr : std::max(combined, link_sinr);
      }
      double db = lin_to_db(combined);
      if (db >= beta && db > best) {
        best = db;
        r.emission = cand[k];
        r.sinr_db = db;
      }
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace gallop
