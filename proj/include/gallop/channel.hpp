#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "gallop/rng.hpp"
#include "gallop/topology.hpp"
#include "gallop/types.hpp"

namespace gallop {

struct NonpositiveDistance : std::domain_error {
  using std::domain_error::domain_error;
};

struct LinkModelParams {
  double tx_power_dbm = 9.0;
  double noise_density_dbm_hz = -174.0;
  double bandwidth_hz = 2e6;
  double path_loss_exponent = 3.3;
  double pl_d0_db = 58.1;
  double d0_m = 8.0;
  double snr_threshold_db = 25.0;

  double noise_power_dbm() const;
  void validate() const;
};

double path_loss_db(double d, const LinkModelParams& p);
double mean_snr_db(double d, const LinkModelParams& p);
// SNR for a given fading power gain E (|h|^2).
double snr_db_with_gain(double d, const LinkModelParams& p, double gain);
double sample_link_snr_db(double d, const LinkModelParams& p, Rng& rng);
// Rayleigh closed form: P(SNR < beta) at distance d.
double rayleigh_outage(double d, const LinkModelParams& p);
// zeta such that outage(d) = 1 - exp(-zeta d^alpha) under the path-loss law above.
double outage_zeta(const LinkModelParams& p);

double db_to_lin(double db);
double lin_to_db(double lin);

struct SinrContext {
  double threshold_db = 25.0;
  double noise_dbm = -110.9897;
  std::vector<double> interferer_dbm;  // received powers of active interferers
};

// snr_db is signal power over noise; interferers are added in linear power.
bool transmission_success(double snr_db, const SinrContext& ctx);
double sinr_db(double signal_dbm, const SinrContext& ctx);

struct InterferenceScenario {
  bool enabled = false;
  int aps_min = 1;
  int aps_max = 1;
  double ap_tx_power_dbm = 14.0;
  double mu_on_ms = 0.25;
  double mu_off_ms = 0.5;
  double ap_distance_min_m = 1.0;
  double ap_distance_max_m = 25.0;
  // Probability that a given AP overlaps a given channel (drawn once per replication).
  double channel_overlap = 0.05;

  static InterferenceScenario none();
  static InterferenceScenario low();
  static InterferenceScenario high();
  void validate() const;
};

enum class InterferenceState { Off, On };

// Alternating renewal process with exponential ON/OFF durations.
class OnOffProcess {
 public:
  OnOffProcess(double mu_on_ms, double mu_off_ms, std::uint64_t seed);
  InterferenceState state(double t_ms);
  bool on(double t_ms) { return state(t_ms) == InterferenceState::On; }

 private:
  void extend(double t_ms);
  double mu_on_;
  double mu_off_;
  std::uint64_t seed_;
  bool initial_on_ = false;
  std::vector<double> switches_;  // increasing switch times
  std::uint64_t draws_ = 0;
};

InterferenceState interference_state(OnOffProcess& ap, double t_ms);

enum class HoppingMode { None, PhaseSlotted, TimeSlotted };

struct ChannelPlan {
  int n_channels = 40;
  int channel_offset = 0;
  HoppingMode mode = HoppingMode::None;
  Channel w_d = 0;
  Channel w_u = 1;
  Channel w_s = 2;
  Channel w_r = 3;
  void validate() const;
  // Channel of a role at (phase, absolute slot) given the hopping mode.
  Channel channel_for(Channel role, long phase_no, long abs_slot) const;
};

Channel hop(long ap_no, const ChannelPlan& plan);

enum class LinkMode { Perfect, Fading };
enum class InterferenceGranularity { PerLink, PerReceiver };
enum class CombiningMode { PowerSum, Selection };

// A transmission as seen by the radio: the set of (cooperative) senders and an opaque tag.
struct RadioEmission {
  std::vector<NodeId> senders;
  Channel channel = 0;
  int tag = 0;
};

struct Reception {
  NodeId listener = 0;
  int emission = -1;  // index into the emission list, -1 = nothing decoded
  double sinr_db = -1e9;
};

// Scripted forced outcomes for worked-example replays.
struct LossScript {
  std::set<std::tuple<long, NodeId, NodeId>> drop;  // (abs slot, sender, listener)
  bool drops(long slot, NodeId tx, NodeId rx) const { return drop.count({slot, tx, rx}) > 0; }
};

struct AccessPoint {
  double distance_m = 1.0;
  std::unique_ptr<OnOffProcess> process;
  std::uint64_t overlap_seed = 0;
};

// Per-replication radio state: fading and interference sample paths are pure functions of
// (seed, link, slot, channel) so different techniques see identical channels.
class RadioEnvironment {
 public:
  RadioEnvironment(const TreeTopology& tree, LinkModelParams link, InterferenceScenario intf, LinkMode mode,
                   std::uint64_t seed);

  // Resolves one slot. Listeners that transmit in this slot are ignored by the caller.
  std::vector<Reception> resolve(long abs_slot, const std::vector<RadioEmission>& emissions,
                                 const std::vector<NodeId>& listeners);

  // Received power (dBm) under the fading draw of (tx, rx, slot, channel).
  double rx_power_dbm(NodeId tx, NodeId rx, long abs_slot, Channel ch) const;
  double external_interference_mw(NodeId tx, NodeId rx, long abs_slot, Channel ch);
  double link_snr_db(NodeId tx, NodeId rx, long abs_slot, Channel ch) const;

  LossScript script;
  CombiningMode combining = CombiningMode::PowerSum;
  InterferenceGranularity granularity = InterferenceGranularity::PerLink;
  double slot_ms = kSlotUs / 1000.0;

  const LinkModelParams& link() const { return link_; }
  LinkMode mode() const { return mode_; }
  const TreeTopology& tree() const { return tree_; }

 private:
  std::vector<AccessPoint>& aps_for(NodeId tx, NodeId rx);
  const TreeTopology& tree_;
  LinkModelParams link_;
  InterferenceScenario intf_;
  LinkMode mode_;
  std::uint64_t seed_;
  double noise_mw_;
  std::map<std::pair<NodeId, NodeId>, std::vector<AccessPoint>> aps_;
};

}  // namespace gallop
