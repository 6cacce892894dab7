#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "gallop/harness.hpp"

using namespace gallop;

TEST_CASE("presets carry the published setup") {
  auto a = preset("scenario-a");
  CHECK(a.topology.mean == 20);
  CHECK(a.topology.side == 60);
  CHECK(a.link.snr_threshold_db == 25);
  CHECK(a.replications == 1000);
  CHECK_FALSE(a.intf.enabled);
  auto b = preset("scenario-b");
  CHECK(b.topology.mean == 50);
  CHECK(b.topology.side == 80);
  auto lo = preset("low-intf");
  CHECK(lo.intf.enabled);
  CHECK(lo.intf.mu_on_ms == 0.25);
  CHECK(lo.intf.mu_off_ms == 0.5);
  auto hi = preset("high-intf");
  CHECK(hi.intf.mu_on_ms == 1.5);
  CHECK(hi.intf.aps_max == 3);
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("scenario JSON round trip keeps the hash") {
  auto c = preset("high-intf");
  c.technique = RetxTechnique::Extrapolation;
  c.relay_budget = 2;
  c.seed = 99;
  auto back = scenario_from_json(scenario_to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(back.technique == RetxTechnique::Extrapolation);
  CHECK(back.intf.aps_max == 3);
  back.seed = 100;
  CHECK(config_hash(back) != config_hash(c));
  c.threads = 7;  // not part of the identity
  CHECK(config_hash(c) == config_hash(scenario_from_json(scenario_to_json(c))));
}

TEST_CASE("scenario JSON rejects bad input") {
  CHECK_THROWS_AS(scenario_from_json("{"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(R"({"version": 2})"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(R"({"replications": 0})"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(R"({"interference": "medium"})"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(R"({"retx": {"technique": "magic"}})"), ConfigError);
  auto c = scenario_from_json(R"({"preset": "scenario-b", "replications": 5})");
  CHECK(c.topology.mean == 50);
  CHECK(c.replications == 5);
}

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> v{5, 1, 4, 2, 3, 6, 7, 8, 9, 10};
  CHECK(nearest_rank(v, 0.9) == 9);
  CHECK(nearest_rank(v, 0.5) == 5);
  CHECK(nearest_rank({42}, 0.9) == 42);
  CHECK(std::isnan(nearest_rank({}, 0.5)));
  auto s = summarize({1, 2, 3, 4});
  CHECK(s.n == 4);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.p50 == 2);
  CHECK(s.p90 == 4);
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
}

TEST_CASE("fig4 fixed topology over perfect links") {
  ScenarioConfig c;
  c.topology.kind = TopologyKind::Bundled;
  c.topology.name = "fig4";
  c.link_mode = LinkMode::Perfect;
  c.cycles = 1;
  auto r = run_replication(c, 1);
  CHECK(r.converged);
  CHECK(r.pdr_defined);
  CHECK(r.pdr_percent == 100.0);
  CHECK(r.cycle_slots == 9);
  CHECK(r.conflicts == 0);
}

TEST_CASE("zero-device topology leaves PDR undefined") {
  ScenarioConfig c;
  c.topology.mean = 0;
  auto r = run_replication(c, 3);
  CHECK(r.nodes == 1);
  CHECK_FALSE(r.pdr_defined);
  REQUIRE(r.warnings.size() == 1);
  c.replications = 1;
  auto s = summarize_runs({r}, c);
  CHECK(s.find("pdr_percent")->n == 0);
}

TEST_CASE("a single replication summarizes to itself") {
  auto c = preset("scenario-a");
  c.replications = 1;
  c.cycles = 2;
  auto res = monte_carlo(c);
  REQUIRE(res.runs.size() == 1);
  const auto& r = res.runs[0];
  CHECK(r.seed == replication_seed(c.seed, 0));
  const auto* conv = res.summary.find("convergence_slots");
  CHECK(conv->mean == r.convergence_slots);
  CHECK(conv->p90 == r.convergence_slots);
  CHECK(conv->min == conv->max);
  CHECK(conv->stddev == 0);
  CHECK(res.summary.find("cycle_ms")->mean == doctest::Approx(r.cycle_slots * 0.2));
  CHECK(res.summary.find("pdr_percent")->mean == r.pdr_percent);
}

TEST_CASE("results round trip through CSV and are reproducible") {
  auto c = preset("low-intf");
  c.replications = 12;
  c.cycles = 2;
  c.technique = RetxTechnique::Extrapolation;
  c.threads = 4;
  auto a = monte_carlo(c);
  c.threads = 1;
  auto b = monte_carlo(c);
  auto csv = render_results(a.summary, OutputFormat::Csv);
  CHECK(csv == render_results(b.summary, OutputFormat::Csv));
  CHECK(render_results(a.summary, OutputFormat::Json) == render_results(b.summary, OutputFormat::Json));
  CHECK(parse_results_csv(csv) == a.summary);
  CHECK(a.summary.config_hash == config_hash(c));
}

TEST_CASE("low-interference single run stays in a sane band") {
  auto c = preset("low-intf");
  auto r = run_replication(c, replication_seed(c.seed, 0));
  REQUIRE(r.pdr_defined);
  CHECK(r.pdr_percent >= 80.0);
  CHECK(r.pdr_percent <= 100.0);
}

TEST_CASE("WISA reference constants") {
  CHECK(wisa_reference(50, 4) == 160);
  CHECK(wisa_reference(120, 2) == 96);
  CHECK_THROWS_AS(wisa_reference(121, 4), ConfigError);
  CHECK_THROWS_AS(wisa_reference(10, 3), UnsupportedRetxCount);
}

TEST_CASE("CDF export") {
  std::vector<RunRecord> runs(3);
  for (int i = 0; i < 3; ++i) {
    runs[static_cast<std::size_t>(i)].converged = true;
    runs[static_cast<std::size_t>(i)].pdr_defined = true;
  }
  runs[0].pdr_percent = 90;
  runs[1].pdr_percent = 100;
  runs[2].pdr_percent = 100;
  CHECK(plot_cdf(runs, "pdr_percent") == "x,y\n90,0.33333333333333331\n100,1\n");
  CHECK_THROWS_AS(plot_cdf(runs, "bogus"), ConfigError);
}
