#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gallop/channel.hpp"
#include "gallop/schedule.hpp"
#include "gallop/signaling.hpp"
#include "gallop/topology.hpp"

namespace gallop {

enum class RetxTechnique { None, DuplicationOpt1, DuplicationOpt2, RetxScheduling, Extrapolation };

std::string to_string(RetxTechnique t);
RetxTechnique parse_retx_technique(const std::string& s);  // none|dup1|dup2|retx-sched|extrapolate

struct RetxNonConvergence : Error {
  explicit RetxNonConvergence(int horizon)
      : Error("retransmission signaling did not converge within " + std::to_string(horizon) + " slots"),
        max_slots(horizon) {}
  int max_slots;
};

// ---------------------------------------------------------------------------
// Frame plans: a cycle or a retransmission phase as a sequence of frames at offsets.

struct TimedFrame {
  int offset = 0;  // first slot of the frame relative to the plan start
  Frame frame;
};

struct FramePlan {
  std::vector<TimedFrame> frames;
  int length = 0;  // total slots, including idle switching slots
};

// DL frame then UL frame on the schedule's channels.
FramePlan base_cycle(const Schedule& s, const TreeTopology& tree);

// Channel used by duplicate round k (k = 0 is the original) for a role channel.
Channel duplicate_channel(Channel role, int round, const ChannelPlan& plan);

// Option 1: DL+UL repeated `rounds` more times, each round on new channels, one switching
// slot between rounds. Option 2: every transmission at t moves to 2t and gets a duplicate at
// 2t+1 on another channel.
FramePlan duplicate_schedule(const Schedule& s, const TreeTopology& tree, int option, int rounds,
                             const ChannelPlan& plan = {});

// ---------------------------------------------------------------------------
// Cycle bookkeeping and G-NACKs.

// What every node holds at the end of a transmission cycle.
struct ReceptionRecord {
  std::set<NodeId> has_command;
  std::map<NodeId, std::set<NodeId>> held;       // uplink payload origins, own packet included
  std::map<NodeId, std::set<NodeId>> overheard;  // relay copies
  bool holds(NodeId n, NodeId origin) const;
  bool holds_any(NodeId n, NodeId origin) const;  // held or overheard
  // Everything delivered: the controller holds every node's packet.
  static ReceptionRecord complete(const TreeTopology& tree);
};

// GNackEntry (signaling) ordinals count the child's uplink transmissions.
struct GNack {
  NodeId issuer = 0;
  std::vector<GNackEntry> entries;
  bool empty() const { return entries.empty(); }
};

enum class GNackMode { Plain, Annotated };

// Controller first, then every parent in downlink order. A parent lists the child packets it
// needs; a miss it can serve from its own buffer produces no entry.
std::vector<GNack> ascertain_gnacks(const ReceptionRecord& rec, const TreeTopology& tree, const Schedule& s,
                                    GNackMode mode = GNackMode::Plain);
bool any_missing(const std::vector<GNack>& g);

// ---------------------------------------------------------------------------
// Relays.

struct NtEntry {
  NodeId neighbor = 0;
  double snr_db = 0.0;
};

struct RelayTable {
  std::map<NodeId, NodeId> relay;    // absent = none
  std::map<NodeId, NodeId> relay2;   // second-best candidate
  std::map<NodeId, std::vector<NtEntry>> nt;  // per node, strongest first, at most N_b entries
  int signaling_slots = 0;           // polling procedure length (slots, branches in parallel)
  std::vector<std::string> trace;

  std::optional<NodeId> relay_of(NodeId n) const;
  // Relays engaged for n under a budget of 1 or 2.
  std::vector<NodeId> relays_of(NodeId n, int budget) const;
};

enum class RelayMode { Polling, Online };

// Measured SNR (dB) of a message from tx heard at rx in signaling slot s, or nullopt if lost.
using LinkProbe = std::function<std::optional<double>(NodeId tx, NodeId rx, long slot)>;

struct RelayParams {
  int n_b = 3;
  RelayMode mode = RelayMode::Polling;
  double threshold_db = 25.0;  // online: minimum average SNR
  int online_phases = 8;       // online: overheard phases averaged
  int max_polls = 8;           // polling retries per child
};

RelayTable select_relays(const TreeTopology& tree, const LinkProbe& probe, const RelayParams& p = {});
// Probe over the radio on the signaling channel, starting at abs slot `start`.
RelayTable select_relays(const TreeTopology& tree, RadioEnvironment& radio, const RelayParams& p = {},
                         long start = 0, Channel ch = 2);
// Relay table from an explicit map; every relay must be a sibling of its node.
RelayTable static_relays(const TreeTopology& tree, const std::map<NodeId, NodeId>& relay);

// ---------------------------------------------------------------------------
// Cooperative reception models.

enum class CoopMode { CI, SNC_forward };

struct CoopParams {
  double threshold_db = 25.0;
  double snc_gain_db = 0.0;
  CombiningMode combining = CombiningMode::PowerSum;
};

// CI: combined SNR of the present transmitters against the threshold. SNC: the relay's coded
// packet (snr_b) must decode and the receiver must hold the a-priori packet.
bool cooperative_success(std::optional<double> snr_a_db, std::optional<double> snr_b_db, CoopMode mode,
                         const CoopParams& p = {}, bool receiver_has_apriori = true);
double combined_snr_db(std::optional<double> snr_a_db, std::optional<double> snr_b_db,
                       CombiningMode m = CombiningMode::PowerSum);

// ---------------------------------------------------------------------------
// Retransmission plans.

enum class RequestKind { Buffered, DownlinkRecovery, Forward };
std::string to_string(RequestKind k);

struct RetxRequest {
  NodeId requester = 0;
  NodeId granter = 0;  // parent
  RequestKind kind = RequestKind::Buffered;
  std::vector<NodeId> origins;  // payloads covered (one for Buffered / DL recovery)
  std::vector<DataSlot> slots;  // on W_R
  int rfs_slot = -1;            // RFS-RS slot under loss-free signaling (even)
  int asgn_slot = -1;           // ASGN slot (odd)
};

struct RetxPlan {
  RetxTechnique technique = RetxTechnique::None;
  std::vector<TimedFrame> frames;  // data frames of the retransmission phase
  std::vector<RetxRequest> requests;
  int gnack_slots = 0;      // downlink phase carrying the G-NACKs
  int signaling_slots = 0;  // loss-free retransmission signaling (RFS/ASGN pairs + terminate)
  int data_slots = 0;
  int rounds = 1;
  int relay_budget = 1;
  bool relays_need_handoff = false;  // relay transmits only after the parent's handoff reached it
  bool empty() const { return frames.empty() && requests.empty(); }
  int length() const { return gnack_slots + signaling_slots + data_slots; }
};

struct RetxParams {
  int relay_budget = 1;
  Channel w_r = 3;
  Channel w_d = 0;
  Channel w_u = 1;
  // Extrapolation: keep unaffected slots as silent slots (deterministic length) or compress.
  bool extrapolation_silent = true;
  int horizon = 10000;
};

// On-demand retransmission schedule on W_R, requests in the retransmission signaling order.
RetxPlan build_retx_schedule(const std::vector<GNack>& gnacks, const TreeTopology& tree, const Schedule& s,
                             const RelayTable& relays, const ReceptionRecord& rec, const RetxParams& p = {});

// Reuse of the original frames: annotated slots carry source + relay transmissions.
RetxPlan extrapolate_schedule(const Schedule& s, const std::vector<GNack>& gnacks, const TreeTopology& tree,
                              const RelayTable& relays, const ReceptionRecord& rec, const RetxParams& p = {});

// Conflicts of every frame of a plan (cooperative transmissions are one emission).
std::vector<Conflict> verify_plan(const RetxPlan& plan, const TreeTopology& tree);
std::vector<Conflict> verify_plan(const FramePlan& plan, const TreeTopology& tree);

// Retransmission signaling over the radio: RFS-RS on even slots, ASGN on odd slots, retried
// until acknowledged, TERMINATE after the final ASGN. Returns slots used.
struct RsSignalingResult {
  int slots = 0;
  int attempts = 0;
  std::vector<std::string> trace;
};
RsSignalingResult run_rs_signaling(const RetxPlan& plan, RadioEnvironment& radio, long abs_start, Channel w_s,
                                   int horizon);

}  // namespace gallop
