#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "gallop/analysis.hpp"
#include "gallop/rng.hpp"

using namespace gallop;

TEST_CASE("distance pdf normalizes on a 5x5 grid") {
  for (int K = 1; K <= 5; ++K)
    for (int k = 1; k <= K; ++k) {
      double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double d) { return distance_pdf(d, k, K, 7.0); }, 0.0, 7.0, 15, 1e-12);
      CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("distance pdf K=1 is 2d/R^2") {
  for (double d : {0.0, 0.3, 1.7, 4.0})
    CHECK(distance_pdf(d, 1, 1, 4.0) == doctest::Approx(2 * d / 16.0).epsilon(1e-12));
  CHECK_THROWS_AS(distance_pdf(5.0, 1, 1, 4.0), std::domain_error);
  CHECK_THROWS_AS(distance_pdf(1.0, 3, 2, 4.0), std::domain_error);
}

TEST_CASE("distance pdf matches the 2nd of 3 order statistic") {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 200000, bins = 10;
  std::vector<int> hist(bins, 0);
  for (int i = 0; i < n; ++i) {
    double r[3];
    for (double& x : r) x = std::sqrt(u(rng));
    std::sort(r, r + 3);
    hist[std::min(bins - 1, static_cast<int>(r[1] * bins))]++;
  }
  for (int b = 0; b < bins; ++b) {
    double lo = static_cast<double>(b) / bins, hi = lo + 1.0 / bins;
    double p = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [](double d) { return distance_pdf(d, 2, 3, 1.0); }, lo, hi);
    // four binomial standard errors
    CHECK(std::abs(static_cast<double>(hist[b]) / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("outage integral limits and monotonicity") {
  CHECK(signaling_outage(30, 3.3, 0.0) == 0.0);
  CHECK(signaling_outage(30, 3.3, 1e12) == doctest::Approx(1.0).epsilon(1e-9));
  double prev = 0.0;
  for (double z : {1e-8, 1e-7, 1e-6, 1e-5, 1e-4}) {
    double v = signaling_outage(30, 3.3, z);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(signaling_outage(40, 3.3, 1e-7) > signaling_outage(30, 3.3, 1e-7));
}

TEST_CASE("outage integral matches Monte Carlo through the channel module") {
  LinkModelParams link;
  link.snr_threshold_db = 25.0;
  const double R = 30.0;
  double analytic = signaling_outage(R, link.path_loss_exponent, outage_zeta(link));
  Rng rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 1000000;
  int out = 0;
  for (int i = 0; i < n; ++i) {
    double d = R * std::sqrt(u(rng));
    if (d <= 0) continue;
    if (sample_link_snr_db(d, link, rng) < link.snr_threshold_db) ++out;
  }
  CHECK(std::abs(static_cast<double>(out) / n - analytic) < 0.005);
}

TEST_CASE("allocation failure as printed") {
  CHECK(allocation_failure(0, 0, 0) == 0.0);
  CHECK(allocation_failure(1, 0.4, 0) == 1.0);
  CHECK(allocation_failure(0.1, 0.1, 0) == doctest::Approx(0.19));
  CHECK_THROWS(allocation_failure(1.2, 0, 0));
}

TEST_CASE("first retransmission delay as printed") {
  CHECK(mean_first_retx_delay(4, 0.0) == 0.0);
  CHECK(mean_first_retx_delay(4, 1.0) == 0.0);
  // negative for small failure probabilities; kept as printed
  CHECK(mean_first_retx_delay(4, 0.2) == doctest::Approx(-0.24));
}

TEST_CASE("higher retransmission delay as printed") {
  CHECK(mean_higher_retx_delay(3, 4, 0.0) == 0.0);
  CHECK(mean_higher_retx_delay(2, 4, 0.1) == doctest::Approx(0.19));
  double prev = -1;
  for (int i = 0; i <= 90; ++i) {
    double v = mean_higher_retx_delay(5, 4, i / 100.0);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(mean_higher_retx_delay(2, 4, 1.0), DivergesAtOne);
}

TEST_CASE("mean convergence reduces to 3K+1") {
  for (int K = 1; K <= 30; ++K) CHECK(mean_convergence_at(K, 4, 0.0) == 3.0 * K + 1);
  ConvergenceParams p;
  p.K = 2;
  p.zeta = 0.0;
  auto b = mean_convergence(p);
  CHECK(b.total == 7.0);
  CHECK(corrected_mean_convergence(2, 4, 0.0) == 7.0);
}

TEST_CASE("table rows and csv") {
  LinkModelParams link;
  auto rows = convergence_table({1, 5}, {20, 25}, {30}, link);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].printed.outage < rows[2].printed.outage);
  auto csv = convergence_table_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.rfind("K,beta_db,R_p", 0) == 0);
}
