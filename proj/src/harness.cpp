#include "gallop/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "gallop/central_scheduler.hpp"
#include "gallop/rng.hpp"

namespace gallop {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config

namespace {

template <class E>
struct EnumNames {
  std::vector<std::pair<E, std::string>> v;
  std::string name(E e) const {
    for (const auto& [k, n] : v)
      if (k == e) return n;
    return "?";
  }
  E parse(const std::string& s, const char* what) const {
    for (const auto& [k, n] : v)
      if (n == s) return k;
    throw ConfigError(std::string("unknown ") + what + " '" + s + "'");
  }
};

const EnumNames<TopologyKind> kTopo{{{TopologyKind::Poisson, "poisson"},
                                     {TopologyKind::Bundled, "bundled"},
                                     {TopologyKind::Fixed, "fixed"},
                                     {TopologyKind::Star, "star"},
                                     {TopologyKind::RandomStar, "random-star"}}};
const EnumNames<LinkMode> kLinkMode{{{LinkMode::Fading, "fading"}, {LinkMode::Perfect, "perfect"}}};
const EnumNames<InterferenceGranularity> kGran{
    {{InterferenceGranularity::PerLink, "per-link"}, {InterferenceGranularity::PerReceiver, "per-receiver"}}};
const EnumNames<CombiningMode> kComb{{{CombiningMode::PowerSum, "power-sum"}, {CombiningMode::Selection, "selection"}}};
const EnumNames<HoppingMode> kHop{
    {{HoppingMode::None, "none"}, {HoppingMode::PhaseSlotted, "phase"}, {HoppingMode::TimeSlotted, "time"}}};
const EnumNames<DownlinkMode> kDl{{{DownlinkMode::Broadcast, "broadcast"}, {DownlinkMode::Distinct, "distinct"}}};
const EnumNames<ControllerAnchor> kAnchor{{{ControllerAnchor::Corner, "corner"}, {ControllerAnchor::Center, "center"}}};
const EnumNames<RelayMode> kRelay{{{RelayMode::Polling, "polling"}, {RelayMode::Online, "online"}}};

}  // namespace

void ScenarioConfig::set_interference(const std::string& level) {
  if (level == "none")
    intf = InterferenceScenario::none();
  else if (level == "low")
    intf = InterferenceScenario::low();
  else if (level == "high")
    intf = InterferenceScenario::high();
  else
    throw ConfigError("interference must be none, low or high");
  interference = level;
}

void ScenarioConfig::validate() const {
  if (version != 1) throw ConfigError("unsupported scenario version " + std::to_string(version));
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (cycles < 1) throw ConfigError("cycles must be >= 1");
  if (slot_us <= 0) throw ConfigError("slot_us must be positive");
  if (dup_rounds < 0 || retx_rounds < 1) throw ConfigError("invalid retransmission rounds");
  if (relay_budget != 1 && relay_budget != 2) throw ConfigError("relay budget must be 1 or 2");
  if (psi < 1) throw ConfigError("psi must be >= 1");
  if (topology.kind == TopologyKind::Poisson && (topology.mean < 0 || topology.side <= 0))
    throw ConfigError("poisson topology needs mean >= 0 and side > 0");
  link.validate();
  intf.validate();
}

std::vector<std::string> preset_names() { return {"scenario-a", "scenario-b", "low-intf", "high-intf"}; }

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.replications = 1000;
  c.topology.kind = TopologyKind::Poisson;
  c.topology.mean = 20;
  c.topology.side = 60;
  c.link.snr_threshold_db = 25.0;
  if (name == "scenario-a") return c;
  if (name == "scenario-b") {
    c.topology.mean = 50;
    c.topology.side = 80;
    return c;
  }
  if (name == "low-intf") {
    c.set_interference("low");
    return c;
  }
  if (name == "high-intf") {
    c.set_interference("high");
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

namespace {

ojson to_ojson(const ScenarioConfig& c) {
  ojson j;
  j["version"] = c.version;
  j["name"] = c.name;
  ojson t;
  t["kind"] = kTopo.name(c.topology.kind);
  switch (c.topology.kind) {
    case TopologyKind::Poisson:
      t["mean"] = c.topology.mean;
      t["side"] = c.topology.side;
      t["comm_range"] = c.topology.poisson.comm_range;
      t["anchor"] = kAnchor.name(c.topology.poisson.anchor);
      break;
    case TopologyKind::Bundled: t["name"] = c.topology.name; break;
    case TopologyKind::Fixed:
      if (!c.topology.path.empty()) t["path"] = c.topology.path;
      if (!c.topology.spec_json.empty()) t["spec"] = ojson::parse(c.topology.spec_json);
      break;
    case TopologyKind::Star:
    case TopologyKind::RandomStar:
      t["k"] = c.topology.star_k;
      t["radius"] = c.topology.star_radius;
      break;
  }
  j["topology"] = t;
  j["link"] = {{"tx_power_dbm", c.link.tx_power_dbm},
               {"noise_density_dbm_hz", c.link.noise_density_dbm_hz},
               {"bandwidth_hz", c.link.bandwidth_hz},
               {"path_loss_exponent", c.link.path_loss_exponent},
               {"pl_d0_db", c.link.pl_d0_db},
               {"d0_m", c.link.d0_m}};
  j["beta_db"] = c.link.snr_threshold_db;
  j["link_mode"] = kLinkMode.name(c.link_mode);
  j["interference"] = c.interference;
  j["interference_params"] = {{"enabled", c.intf.enabled},
                              {"aps_min", c.intf.aps_min},
                              {"aps_max", c.intf.aps_max},
                              {"ap_tx_power_dbm", c.intf.ap_tx_power_dbm},
                              {"mu_on_ms", c.intf.mu_on_ms},
                              {"mu_off_ms", c.intf.mu_off_ms},
                              {"ap_distance_min_m", c.intf.ap_distance_min_m},
                              {"ap_distance_max_m", c.intf.ap_distance_max_m},
                              {"channel_overlap", c.intf.channel_overlap}};
  j["granularity"] = kGran.name(c.granularity);
  j["combining"] = kComb.name(c.combining);
  j["retx"] = {{"technique", to_string(c.technique)},
               {"dup_rounds", c.dup_rounds},
               {"retx_rounds", c.retx_rounds},
               {"relay_budget", c.relay_budget},
               {"extrapolation_silent", c.extrapolation_silent},
               {"lossy_gnack", c.lossy_gnack},
               {"n_b", c.relay.n_b},
               {"relay_mode", kRelay.name(c.relay.mode)}};
  j["hopping"] = kHop.name(c.hopping);
  j["downlink_mode"] = kDl.name(c.dl_mode);
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["slot_us"] = c.slot_us;
  j["cycles"] = c.cycles;
  j["psi"] = c.psi;
  j["horizon"] = c.horizon;
  j["lqf"] = c.lqf;
  return j;
}

template <class T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& c) { return to_ojson(c).dump(2) + "\n"; }

ScenarioConfig scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  ScenarioConfig c;
  try {
    if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
    get_if(j, "version", c.version);
    get_if(j, "name", c.name);
    if (j.contains("topology")) {
      const auto& t = j.at("topology");
      if (t.contains("kind")) c.topology.kind = kTopo.parse(t.at("kind").get<std::string>(), "topology kind");
      get_if(t, "mean", c.topology.mean);
      get_if(t, "side", c.topology.side);
      get_if(t, "comm_range", c.topology.poisson.comm_range);
      if (t.contains("anchor")) c.topology.poisson.anchor = kAnchor.parse(t.at("anchor").get<std::string>(), "anchor");
      get_if(t, "name", c.topology.name);
      get_if(t, "path", c.topology.path);
      if (t.contains("spec")) c.topology.spec_json = t.at("spec").dump();
      get_if(t, "k", c.topology.star_k);
      get_if(t, "radius", c.topology.star_radius);
    }
    if (j.contains("link")) {
      const auto& l = j.at("link");
      get_if(l, "tx_power_dbm", c.link.tx_power_dbm);
      get_if(l, "noise_density_dbm_hz", c.link.noise_density_dbm_hz);
      get_if(l, "bandwidth_hz", c.link.bandwidth_hz);
      get_if(l, "path_loss_exponent", c.link.path_loss_exponent);
      get_if(l, "pl_d0_db", c.link.pl_d0_db);
      get_if(l, "d0_m", c.link.d0_m);
    }
    get_if(j, "beta_db", c.link.snr_threshold_db);
    if (j.contains("link_mode")) c.link_mode = kLinkMode.parse(j.at("link_mode").get<std::string>(), "link mode");
    if (j.contains("interference")) c.set_interference(j.at("interference").get<std::string>());
    if (j.contains("interference_params")) {
      const auto& i = j.at("interference_params");
      get_if(i, "enabled", c.intf.enabled);
      get_if(i, "aps_min", c.intf.aps_min);
      get_if(i, "aps_max", c.intf.aps_max);
      get_if(i, "ap_tx_power_dbm", c.intf.ap_tx_power_dbm);
      get_if(i, "mu_on_ms", c.intf.mu_on_ms);
      get_if(i, "mu_off_ms", c.intf.mu_off_ms);
      get_if(i, "ap_distance_min_m", c.intf.ap_distance_min_m);
      get_if(i, "ap_distance_max_m", c.intf.ap_distance_max_m);
      get_if(i, "channel_overlap", c.intf.channel_overlap);
    }
    if (j.contains("granularity")) c.granularity = kGran.parse(j.at("granularity").get<std::string>(), "granularity");
    if (j.contains("combining")) c.combining = kComb.parse(j.at("combining").get<std::string>(), "combining");
    if (j.contains("retx")) {
      const auto& r = j.at("retx");
      if (r.contains("technique")) c.technique = parse_retx_technique(r.at("technique").get<std::string>());
      get_if(r, "dup_rounds", c.dup_rounds);
      get_if(r, "retx_rounds", c.retx_rounds);
      get_if(r, "relay_budget", c.relay_budget);
      get_if(r, "extrapolation_silent", c.extrapolation_silent);
      get_if(r, "lossy_gnack", c.lossy_gnack);
      get_if(r, "n_b", c.relay.n_b);
      if (r.contains("relay_mode")) c.relay.mode = kRelay.parse(r.at("relay_mode").get<std::string>(), "relay mode");
    }
    if (j.contains("hopping")) c.hopping = kHop.parse(j.at("hopping").get<std::string>(), "hopping mode");
    if (j.contains("downlink_mode")) c.dl_mode = kDl.parse(j.at("downlink_mode").get<std::string>(), "downlink mode");
    get_if(j, "replications", c.replications);
    get_if(j, "seed", c.seed);
    get_if(j, "slot_us", c.slot_us);
    get_if(j, "cycles", c.cycles);
    get_if(j, "psi", c.psi);
    get_if(j, "horizon", c.horizon);
    get_if(j, "lqf", c.lqf);
    get_if(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::string& preset_or_path) {
  auto names = preset_names();
  if (std::find(names.begin(), names.end(), preset_or_path) != names.end()) return preset(preset_or_path);
  std::ifstream in(preset_or_path);
  if (!in) throw ConfigError("cannot open scenario '" + preset_or_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

std::string config_hash(const ScenarioConfig& c) {
  std::string s = to_ojson(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Replications

std::uint64_t replication_seed(std::uint64_t master, int index) {
  return derive_seed(master, 1, static_cast<std::uint64_t>(index));
}

namespace {

TreeTopology make_tree(const ScenarioConfig& c, std::uint64_t seed) {
  const auto& t = c.topology;
  switch (t.kind) {
    case TopologyKind::Poisson: return draw_connected_tree(t.mean, t.side, seed, t.poisson).tree;
    case TopologyKind::Bundled: return bundled_topology(t.name);
    case TopologyKind::Fixed:
      if (!t.spec_json.empty()) return load_fixed(parse_fixed_spec(t.spec_json));
      return load_fixed_file(t.path);
    case TopologyKind::Star: return star_topology(t.star_k, t.star_radius);
    case TopologyKind::RandomStar: return random_star(t.star_k, t.star_radius, seed);
  }
  throw ConfigError("bad topology kind");
}

constexpr long kCycleStride = 2048;  // cycle k starts at a fixed clock offset (coupled channels)

}  // namespace

RunRecord run_replication(const ScenarioConfig& c, std::uint64_t seed) {
  RunRecord r;
  r.seed = seed;
  try {
    TreeTopology tree = make_tree(c, derive_seed(seed, 10));
    r.nodes = static_cast<int>(tree.size());
    r.max_hops = tree.max_hops();
    RadioEnvironment radio(tree, c.link, c.intf, c.link_mode, derive_seed(seed, 11));
    radio.granularity = c.granularity;
    radio.combining = c.combining;
    radio.slot_ms = c.slot_us / 1000.0;

    ChannelPlan channels;
    channels.mode = c.hopping;
    SignalingParams sp;
    sp.dl_mode = c.dl_mode;
    sp.psi = c.psi;
    sp.horizon = c.horizon;
    sp.record_trace = false;
    sp.w_d = channels.w_d;
    sp.w_u = channels.w_u;
    sp.w_s = channels.w_s;
    SignalingResult sig;
    try {
      sig = run_signaling(tree, radio, sp, derive_seed(seed, 12));
    } catch (const NonConvergence& e) {
      r.error = e.what();
      return r;
    }
    r.converged = true;
    r.convergence_slots = sig.convergence_slots;
    r.cycle_slots = cycle_time(sig.schedule);
    r.conflicts += static_cast<int>(verify_schedule(sig.schedule, tree).size() +
                                    verify_ordering(sig.schedule, tree).size());
    if (c.lqf) r.lqf_slots = schedule_lqf(tree).duration_slots;
    if (tree.size() <= 1) {
      r.warnings.push_back("no devices: PDR undefined");
      r.effective_cycle_slots = r.cycle_slots;
      return r;
    }

    long clock = sig.convergence_slots;
    RelayTable relays;
    if (c.technique == RetxTechnique::RetxScheduling || c.technique == RetxTechnique::Extrapolation) {
      relays = select_relays(tree, radio, c.relay, clock, channels.w_s);
      clock += relays.signaling_slots;
    }
    DataPlane dp(tree, radio, relays);
    EngineParams ep;
    ep.technique = c.technique;
    ep.dup_rounds = c.dup_rounds;
    ep.retx_rounds = c.retx_rounds;
    ep.lossy_gnack = c.lossy_gnack;
    ep.channels = channels;
    ep.retx.relay_budget = c.relay_budget;
    ep.retx.extrapolation_silent = c.extrapolation_silent;
    ep.retx.horizon = c.horizon;
    ep.retx.w_d = channels.w_d;
    ep.retx.w_u = channels.w_u;
    ep.retx.w_r = channels.w_r;

    long base = (clock / kCycleStride + 1) * kCycleStride;
    long cursor = base;
    long delivered = 0, expected = 0, slots = 0;
    for (int k = 0; k < c.cycles; ++k) {
      long start = std::max(base + k * kCycleStride, cursor);
      CycleOutcome out;
      ep.cycle_no = k;
      try {
        out = dp.run_cycle(sig.schedule, ep, start);
      } catch (const RetxNonConvergence& e) {
        r.error = e.what();
        return r;
      }
      for (const auto& p : out.plans) r.conflicts += static_cast<int>(verify_plan(p, tree).size());
      delivered += out.delivered;
      expected += out.expected;
      slots += out.total_slots();
      cursor = start + out.total_slots();
    }
    r.pdr_defined = expected > 0;
    r.pdr_percent = expected ? 100.0 * static_cast<double>(delivered) / static_cast<double>(expected) : 0.0;
    r.effective_cycle_slots = static_cast<double>(slots) / c.cycles;
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Statistics

double nearest_rank(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  k = std::clamp<std::size_t>(k, 1, v.size());
  return v[k - 1];
}

MetricStats summarize(const std::vector<double>& v) {
  MetricStats s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / s.n;
  double ss = 0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = s.n > 1 ? std::sqrt(ss / (s.n - 1)) : 0.0;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  s.p50 = nearest_rank(v, 0.5);
  s.p90 = nearest_rank(v, 0.9);
  return s;
}

const MetricStats* MetricsSummary::find(const std::string& name) const {
  for (const auto& [n, s] : metrics)
    if (n == name) return &s;
  return nullptr;
}

bool MetricsSummary::operator==(const MetricsSummary& o) const {
  if (config_hash != o.config_hash || seed != o.seed || replications != o.replications ||
      nonconvergence_count != o.nonconvergence_count || metrics.size() != o.metrics.size())
    return false;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const auto& a = metrics[i].second;
    const auto& b = o.metrics[i].second;
    if (metrics[i].first != o.metrics[i].first || a.n != b.n || a.mean != b.mean || a.stddev != b.stddev ||
        a.min != b.min || a.p50 != b.p50 || a.p90 != b.p90 || a.max != b.max)
      return false;
  }
  return true;
}

MetricsSummary summarize_runs(const std::vector<RunRecord>& runs, const ScenarioConfig& c) {
  MetricsSummary s;
  s.config_hash = config_hash(c);
  s.seed = c.seed;
  s.replications = static_cast<int>(runs.size());
  std::vector<double> conv, conv_ms, cyc, cyc_ms, eff, eff_ms, pdr, hops, nodes, lqf, conflicts;
  const double ms = c.slot_us / 1000.0;
  for (const auto& r : runs) {
    if (!r.converged) {
      ++s.nonconvergence_count;
      continue;
    }
    conv.push_back(r.convergence_slots);
    conv_ms.push_back(r.convergence_slots * ms);
    cyc.push_back(r.cycle_slots);
    cyc_ms.push_back(r.cycle_slots * ms);
    if (r.error.empty()) {
      eff.push_back(r.effective_cycle_slots);
      eff_ms.push_back(r.effective_cycle_slots * ms);
      if (r.pdr_defined) pdr.push_back(r.pdr_percent);
    }
    hops.push_back(r.max_hops);
    nodes.push_back(r.nodes);
    conflicts.push_back(r.conflicts);
    if (c.lqf) lqf.push_back(r.lqf_slots);
  }
  s.metrics = {{"convergence_slots", summarize(conv)},
               {"convergence_ms", summarize(conv_ms)},
               {"cycle_slots", summarize(cyc)},
               {"cycle_ms", summarize(cyc_ms)},
               {"effective_cycle_slots", summarize(eff)},
               {"effective_cycle_ms", summarize(eff_ms)},
               {"pdr_percent", summarize(pdr)},
               {"max_hops", summarize(hops)},
               {"nodes", summarize(nodes)},
               {"conflicts", summarize(conflicts)}};
  if (c.lqf) s.metrics.push_back({"lqf_slots", summarize(lqf)});
  return s;
}

MonteCarloResult monte_carlo(const ScenarioConfig& c) {
  c.validate();
  MonteCarloResult res;
  res.runs.resize(static_cast<std::size_t>(c.replications));
  unsigned n_threads = c.threads > 0 ? static_cast<unsigned>(c.threads) : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(c.replications));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < c.replications; i = next++)
      res.runs[static_cast<std::size_t>(i)] = run_replication(c, replication_seed(c.seed, i));
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n_threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  res.summary = summarize_runs(res.runs, c);
  return res;
}

int wisa_reference(int n_nodes, int retx_count) {
  if (n_nodes < 0 || n_nodes > 120) throw ConfigError("WISA reference covers up to 120 devices");
  if (retx_count == 4) return 160;
  if (retx_count == 2) return 96;
  throw UnsupportedRetxCount("WISA reference exists for 2 or 4 retransmissions only");
}

// ---------------------------------------------------------------------------
// Output

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("format must be csv or json");
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_num(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

}  // namespace

std::string render_results(const MetricsSummary& s, OutputFormat f) {
  if (f == OutputFormat::Json) {
    ojson j;
    j["format_version"] = 1;
    j["config_hash"] = s.config_hash;
    j["seed"] = s.seed;
    j["replications"] = s.replications;
    j["nonconvergence_count"] = s.nonconvergence_count;
    ojson m = ojson::object();
    for (const auto& [name, st] : s.metrics)
      m[name] = {{"n", st.n}, {"mean", st.mean}, {"stddev", st.stddev}, {"min", st.min},
                 {"p50", st.p50}, {"p90", st.p90}, {"max", st.max}};
    j["metrics"] = m;
    return j.dump(2) + "\n";
  }
  std::ostringstream o;
  o << "metric,n,mean,stddev,min,p50,p90,max,config_hash,seed,replications,nonconvergence_count\n";
  for (const auto& [name, st] : s.metrics)
    o << name << ',' << st.n << ',' << num(st.mean) << ',' << num(st.stddev) << ',' << num(st.min) << ','
      << num(st.p50) << ',' << num(st.p90) << ',' << num(st.max) << ',' << s.config_hash << ',' << s.seed << ','
      << s.replications << ',' << s.nonconvergence_count << '\n';
  return o.str();
}

void emit_results(const MetricsSummary& s, OutputFormat f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << render_results(s, f);
  if (!out) throw Error("write failed for '" + path + "'");
}

MetricsSummary parse_results_csv(const std::string& text) {
  MetricsSummary s;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 12) throw InconsistentSpec("results csv: expected 12 columns");
    MetricStats st;
    st.n = std::stoi(f[1]);
    st.mean = parse_num(f[2]);
    st.stddev = parse_num(f[3]);
    st.min = parse_num(f[4]);
    st.p50 = parse_num(f[5]);
    st.p90 = parse_num(f[6]);
    st.max = parse_num(f[7]);
    s.config_hash = f[8];
    s.seed = std::stoull(f[9]);
    s.replications = std::stoi(f[10]);
    s.nonconvergence_count = std::stoi(f[11]);
    s.metrics.push_back({f[0], st});
  }
  return s;
}

std::string plot_cdf(const std::vector<RunRecord>& runs, const std::string& metric) {
  std::vector<double> v;
  for (const auto& r : runs) {
    if (!r.converged) continue;
    if (metric == "pdr_percent") {
      if (r.pdr_defined && r.error.empty()) v.push_back(r.pdr_percent);
    } else if (metric == "convergence_slots") {
      v.push_back(r.convergence_slots);
    } else if (metric == "cycle_slots") {
      v.push_back(r.cycle_slots);
    } else if (metric == "effective_cycle_slots") {
      if (r.error.empty()) v.push_back(r.effective_cycle_slots);
    } else {
      throw ConfigError("no CDF for metric '" + metric + "'");
    }
  }
  std::sort(v.begin(), v.end());
  std::ostringstream o;
  o << "x,y\n";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    o << num(v[i]) << ',' << num(static_cast<double>(i + 1) / static_cast<double>(v.size())) << '\n';
  }
  return o.str();
}

}  // namespace gallop
