#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gallop/channel.hpp"
#include "gallop/dist_scheduler.hpp"
#include "gallop/engine.hpp"
#include "gallop/retransmission.hpp"
#include "gallop/topology.hpp"

namespace gallop {

struct UnsupportedRetxCount : ConfigError {
  using ConfigError::ConfigError;
};

enum class TopologyKind { Poisson, Bundled, Fixed, Star, RandomStar };

struct TopologySource {
  TopologyKind kind = TopologyKind::Poisson;
  double mean = 20.0;
  double side = 60.0;
  PoissonOptions poisson;
  std::string name;       // bundled
  std::string path;       // fixed spec file
  std::string spec_json;  // fixed spec inline
  int star_k = 10;
  double star_radius = 10.0;
};

struct ScenarioConfig {
  int version = 1;
  std::string name = "custom";
  TopologySource topology;
  LinkModelParams link;
  LinkMode link_mode = LinkMode::Fading;
  std::string interference = "none";
  InterferenceScenario intf;
  InterferenceGranularity granularity = InterferenceGranularity::PerLink;
  CombiningMode combining = CombiningMode::PowerSum;
  RetxTechnique technique = RetxTechnique::None;
  int dup_rounds = 1;
  int retx_rounds = 1;
  int relay_budget = 1;
  bool extrapolation_silent = true;
  bool lossy_gnack = false;
  RelayParams relay;
  HoppingMode hopping = HoppingMode::PhaseSlotted;  // data phases; signaling stays on W_S
  DownlinkMode dl_mode = DownlinkMode::Broadcast;
  int replications = 100;
  std::uint64_t seed = 1;
  double slot_us = kSlotUs;
  int cycles = 10;
  int psi = 4;
  int horizon = 10000;
  bool lqf = false;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
  void set_interference(const std::string& level);  // none|low|high
};

std::vector<std::string> preset_names();
ScenarioConfig preset(const std::string& name);
// Preset name or config file path.
ScenarioConfig load_scenario(const std::string& preset_or_path);
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& c);
// FNV-1a over the canonical JSON form.
std::string config_hash(const ScenarioConfig& c);

struct RunRecord {
  std::uint64_t seed = 0;
  int nodes = 0;  // including the controller
  int max_hops = 0;
  bool converged = false;
  bool pdr_defined = false;
  int convergence_slots = 0;
  int cycle_slots = 0;            // schedule length (DL + UL)
  double effective_cycle_slots = 0;  // mean per cycle including duplication and retransmissions
  double pdr_percent = 0;
  int conflicts = 0;            // oracle conflicts in the schedule and all retransmission plans
  int lqf_slots = 0;
  std::string error;
  std::vector<std::string> warnings;
};

// Per-replication seed: derive_seed(master, 1, index).
std::uint64_t replication_seed(std::uint64_t master, int index);
RunRecord run_replication(const ScenarioConfig& c, std::uint64_t seed);

struct MetricStats {
  int n = 0;
  double mean = 0, stddev = 0, min = 0, p50 = 0, p90 = 0, max = 0;
};

// Nearest rank: the ceil(q * n)-th smallest sample.
double nearest_rank(std::vector<double> v, double q);
MetricStats summarize(const std::vector<double>& v);

struct MetricsSummary {
  std::string config_hash;
  std::uint64_t seed = 0;
  int replications = 0;
  int nonconvergence_count = 0;
  std::vector<std::pair<std::string, MetricStats>> metrics;  // stable order
  const MetricStats* find(const std::string& name) const;
  bool operator==(const MetricsSummary& o) const;
};

struct MonteCarloResult {
  MetricsSummary summary;
  std::vector<RunRecord> runs;  // seed order
};

MonteCarloResult monte_carlo(const ScenarioConfig& c);
MetricsSummary summarize_runs(const std::vector<RunRecord>& runs, const ScenarioConfig& c);

// Fixed reference values for comparison plots; not a simulation.
int wisa_reference(int n_nodes, int retx_count);

enum class OutputFormat { Csv, Json };
OutputFormat parse_format(const std::string& s);
std::string render_results(const MetricsSummary& s, OutputFormat f);
void emit_results(const MetricsSummary& s, OutputFormat f, const std::string& path);
MetricsSummary parse_results_csv(const std::string& text);
// Empirical CDF of one per-run metric as "x,y" lines.
std::string plot_cdf(const std::vector<RunRecord>& runs, const std::string& metric);

}  // namespace gallop
