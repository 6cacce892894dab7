#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gallop/analysis.hpp"
#include "gallop/harness.hpp"

using namespace gallop;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

TreeTopology topology_by_name(const std::string& name) {
  auto names = bundled_topology_names();
  if (std::find(names.begin(), names.end(), name) != names.end()) return bundled_topology(name);
  return load_fixed_file(name);
}

std::string describe_schedule(const Schedule& s) {
  std::ostringstream o;
  for (const auto& [n, slots] : s.dl_slots) {
    o << "DL " << n << ":";
    for (auto t : slots) o << " t" << t;
    o << '\n';
  }
  for (const auto& [n, slots] : s.ul_slots) {
    o << "UL " << n << ":";
    for (auto t : slots) o << " t" << t;
    o << '\n';
  }
  o << "cycle " << cycle_time(s) << " slots\n";
  return o.str();
}

// Trace file: "# key value" header lines, then one event per line.
struct TraceHeader {
  std::string topology = "fig4";
  std::uint64_t seed = 1;
  std::string link = "perfect";
  double beta = 25.0;
};

SignalingResult run_traced(const TraceHeader& h) {
  auto tree = topology_by_name(h.topology);
  LinkModelParams link;
  link.snr_threshold_db = h.beta;
  LinkMode mode = h.link == "perfect" ? LinkMode::Perfect : LinkMode::Fading;
  RadioEnvironment radio(tree, link, InterferenceScenario::none(), mode, derive_seed(h.seed, 11));
  SignalingParams sp;
  sp.record_trace = true;
  return run_signaling(tree, radio, sp, derive_seed(h.seed, 12));
}

std::string render_trace(const TraceHeader& h, const SignalingResult& r) {
  std::ostringstream o;
  o << "# topology " << h.topology << "\n# seed " << h.seed << "\n# link " << h.link << "\n# beta " << h.beta << '\n';
  for (const auto& e : r.trace) o << format_trace_line(e) << '\n';
  return o.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GALLOP simulator"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo run of a scenario");
  std::string scenario = "scenario-a", retx, interference, out, format = "csv", cdf_metric, cdf_out;
  std::uint64_t seed = 0;
  int reps = 0, threads = 0;
  double beta = 0;
  bool lqf = false;
  sim->add_option("--scenario", scenario, "preset name or scenario file");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--reps", reps, "replications");
  sim->add_option("--retx", retx, "none|dup1|dup2|dup-slot|retx-sched|extrapolate");
  sim->add_option("--interference", interference, "none|low|high");
  sim->add_option("--beta", beta, "decoding threshold in dB");
  std::string hopping;
  int dup_rounds = 0, retx_rounds = 0;
  sim->add_option("--hopping", hopping, "none|phase|time")->check(CLI::IsMember({"none", "phase", "time"}));
  sim->add_option("--dup-rounds", dup_rounds, "duplication rounds (overrides dup1/dup2)");
  sim->add_option("--retx-rounds", retx_rounds, "retransmission phases per cycle");
  sim->add_option("--out", out, "output path (default stdout)");
  sim->add_option("--format", format, "csv|json");
  sim->add_option("--threads", threads, "worker threads (0 = all cores)");
  sim->add_flag("--lqf", lqf, "also compute the centralized LQF schedule length");
  sim->add_option("--cdf", cdf_metric, "per-run metric to export as an empirical CDF");
  sim->add_option("--cdf-out", cdf_out, "CDF output path");

  // analyze
  auto* ana = app.add_subcommand("analyze", "analytic convergence tables");
  std::vector<int> ks{5, 10, 25, 50, 75};
  std::vector<double> betas{10, 15, 20, 25};
  std::vector<double> radii{30};
  int psi = 4;
  std::string ana_out;
  ana->add_option("--k", ks, "children counts");
  ana->add_option("--beta", betas, "thresholds in dB");
  ana->add_option("--radius", radii, "R_p values in m");
  ana->add_option("--psi", psi, "back-off window");
  ana->add_option("--out", ana_out, "output path (default stdout)");

  // trace / replay
  auto* tr = app.add_subcommand("trace", "record a signaling trace");
  TraceHeader th;
  std::string tr_out;
  tr->add_option("--topology", th.topology, "bundled name or fixed spec file");
  tr->add_option("--seed", th.seed, "seed");
  tr->add_option("--link", th.link, "perfect|fading")->check(CLI::IsMember({"perfect", "fading"}));
  tr->add_option("--beta", th.beta, "decoding threshold in dB");
  tr->add_option("--out", tr_out, "output path (default stdout)");

  auto* rp = app.add_subcommand("replay", "re-run a recorded trace and compare event by event");
  std::string trace_path;
  rp->add_option("--trace", trace_path, "trace file")->required();

  // config
  auto* cf = app.add_subcommand("config", "print the canonical scenario file of a preset or config");
  std::string cf_scenario = "scenario-a", cf_out;
  cf->add_option("scenario", cf_scenario, "preset name or scenario file");
  cf->add_option("--out", cf_out, "output path (default stdout)");

  // export-topology
  auto* ex = app.add_subcommand("export-topology", "write a topology as a fixed spec");
  std::string ex_name, ex_out;
  std::uint64_t ex_seed = 1;
  double ex_mean = 20, ex_side = 60;
  ex->add_option("--name", ex_name, "bundled topology name (empty = Poisson draw)");
  ex->add_option("--seed", ex_seed, "Poisson seed");
  ex->add_option("--mean", ex_mean, "Poisson mean");
  ex->add_option("--side", ex_side, "square side in m");
  ex->add_option("--out", ex_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      ScenarioConfig c = load_scenario(scenario);
      if (sim->count("--seed")) c.seed = seed;
      if (reps > 0) c.replications = reps;
      if (!retx.empty()) {
        if (retx == "dup2") {
          c.technique = RetxTechnique::DuplicationOpt1;
          c.dup_rounds = 2;
        } else if (retx == "dup-slot") {
          c.technique = RetxTechnique::DuplicationOpt2;
        } else {
          c.technique = parse_retx_technique(retx);
          if (retx == "dup1") c.dup_rounds = 1;
        }
      }
      if (!interference.empty()) c.set_interference(interference);
      if (!hopping.empty())
        c.hopping = hopping == "none" ? HoppingMode::None
                    : hopping == "phase" ? HoppingMode::PhaseSlotted
                                         : HoppingMode::TimeSlotted;
      if (dup_rounds > 0) c.dup_rounds = dup_rounds;
      if (retx_rounds > 0) c.retx_rounds = retx_rounds;
      if (sim->count("--beta")) c.link.snr_threshold_db = beta;
      if (lqf) c.lqf = true;
      c.threads = threads;
      auto fmt = parse_format(format);
      c.validate();
      auto res = monte_carlo(c);
      write_out(out, render_results(res.summary, fmt));
      if (!cdf_metric.empty()) write_out(cdf_out, plot_cdf(res.runs, cdf_metric));
      int errors = 0;
      for (const auto& r : res.runs)
        if (!r.error.empty()) ++errors;
      if (errors) {
        std::fprintf(stderr, "%d of %d replications hit the convergence budget\n", errors, c.replications);
        return 3;
      }
      return 0;
    }
    if (*ana) {
      auto rows = convergence_table(ks, betas, radii, LinkModelParams{}, psi);
      write_out(ana_out, convergence_table_csv(rows));
      return 0;
    }
    if (*tr) {
      write_out(tr_out, render_trace(th, run_traced(th)));
      return 0;
    }
    if (*rp) {
      std::istringstream in(read_file(trace_path));
      TraceHeader h;
      std::vector<std::string> recorded;
      for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        if (line[0] == '#') {
          std::istringstream ls(line.substr(1));
          std::string key, value;
          ls >> key >> value;
          if (key == "topology") h.topology = value;
          else if (key == "seed") h.seed = std::stoull(value);
          else if (key == "link") h.link = value;
          else if (key == "beta") h.beta = std::stod(value);
          continue;
        }
        if (!parse_trace_line(line)) throw ConfigError("unparseable trace line: " + line);
        recorded.push_back(line);
      }
      auto r = run_traced(h);
      std::size_t n = std::min(recorded.size(), r.trace.size());
      for (std::size_t i = 0; i < n; ++i) {
        auto got = format_trace_line(r.trace[i]);
        if (got != recorded[i]) {
          std::fprintf(stderr, "divergence at event %zu\n  recorded: %s\n  replayed: %s\n", i, recorded[i].c_str(),
                       got.c_str());
          return 4;
        }
      }
      if (recorded.size() != r.trace.size()) {
        std::fprintf(stderr, "event count differs: recorded %zu, replayed %zu\n", recorded.size(), r.trace.size());
        return 4;
      }
      std::cout << "replayed " << n << " events, convergence " << r.convergence_slots << " slots\n"
                << describe_schedule(r.schedule);
      return 0;
    }
    if (*cf) {
      write_out(cf_out, scenario_to_json(load_scenario(cf_scenario)));
      return 0;
    }
    if (*ex) {
      TreeTopology t = ex_name.empty() ? draw_connected_tree(ex_mean, ex_side, ex_seed).tree : bundled_topology(ex_name);
      write_out(ex_out, serialize_fixed_spec(spec_from_tree(t)));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const RetxNonConvergence& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
