#include "gallop/analysis.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gallop {

namespace {

template <class F>
double integrate(F f, double a, double b) {
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12, &err);
  if (err > 1e-8) throw std::runtime_error("quadrature did not reach 1e-8");
  return v;
}

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string(what) + " must be in [0,1]");
}

}  // namespace

void ConvergenceParams::validate() const {
  if (K < 1) throw std::domain_error("K must be >= 1");
  if (!(R_p > 0)) throw std::domain_error("R_p must be > 0");
  if (!(zeta >= 0)) throw std::domain_error("zeta must be >= 0");
  if (psi < 1) throw std::domain_error("psi must be >= 1");
}

ConvergenceParams params_from_link(int K, double R_p, const LinkModelParams& link, int psi) {
  ConvergenceParams p;
  p.K = K;
  p.R_p = R_p;
  p.alpha = link.path_loss_exponent;
  p.zeta = outage_zeta(link);
  p.psi = psi;
  return p;
}

double distance_pdf(double d, int k, int K, double R_p) {
  if (K < 1 || k < 1 || k > K) throw std::domain_error("distance_pdf: need 1 <= k <= K");
  if (!(R_p > 0)) throw std::domain_error("distance_pdf: R_p must be > 0");
  if (d < 0 || d > R_p) throw std::domain_error("distance_pdf: d outside [0, R_p]");
  double x = d * d / (R_p * R_p);
  double a = K - k + 1, b = k;
  double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  double px = k == 1 ? 1.0 : std::pow(x, k - 1);
  double qx = K == k ? 1.0 : std::pow(1.0 - x, K - k);
  return px * qx * std::exp(-log_beta) * 2.0 * d / (R_p * R_p);
}

double signaling_outage(double R_p, double alpha, double zeta) {
  if (!(R_p > 0)) throw std::domain_error("R_p must be > 0");
  if (zeta == 0.0) return 0.0;
  double v = integrate([&](double d) { return d * -std::expm1(-zeta * std::pow(d, alpha)); }, 0.0, R_p);
  return std::min(1.0, std::max(0.0, 2.0 * v / (R_p * R_p)));
}

double signaling_outage_kth(int k, int K, double R_p, double alpha, double zeta) {
  if (zeta == 0.0) return 0.0;
  double v = integrate(
      [&](double d) { return distance_pdf(d, k, K, R_p) * -std::expm1(-zeta * std::pow(d, alpha)); }, 0.0, R_p);
  return std::min(1.0, std::max(0.0, v));
}

double allocation_failure(double p_rfs, double p_asgn, double p_dls) {
  check_prob(p_rfs, "p_rfs");
  check_prob(p_asgn, "p_asgn");
  check_prob(p_dls, "p_dls");
  return (p_rfs + (1.0 - p_rfs) * p_asgn) * (1.0 - p_dls);
}

double mean_first_retx_delay(int K, double p) {
  if (K < 1) throw std::domain_error("K must be >= 1");
  check_prob(p, "p_fail");
  return 1.5 * p * (1.0 - p) * ((K - 1) - (K + 1) * (1.0 - p));
}

double mean_higher_retx_delay(int K, int psi, double p) {
  if (K < 1) throw std::domain_error("K must be >= 1");
  check_prob(p, "p_fail");
  if (p == 1.0) throw DivergesAtOne();
  return 1.5 * (K + psi) * (2 * p * p - p * p * p) / (1.0 - p);
}

double mean_convergence_at(int K, int psi, double p_fail) {
  return (3.0 * K + 1) + mean_first_retx_delay(K, p_fail) + mean_higher_retx_delay(K, psi, p_fail);
}

ConvergenceBreakdown mean_convergence(const ConvergenceParams& p) {
  p.validate();
  ConvergenceBreakdown b;
  b.outage = signaling_outage(p.R_p, p.alpha, p.zeta);
  b.p_fail = allocation_failure(b.outage, b.outage, b.outage);
  b.ideal = 3.0 * p.K + 1;
  b.first = mean_first_retx_delay(p.K, b.p_fail);
  b.higher = mean_higher_retx_delay(p.K, p.psi, b.p_fail);
  b.total = b.ideal + b.first + b.higher;
  return b;
}

double corrected_mean_convergence(int K, int psi, double p_msg) {
  if (K < 1) throw std::domain_error("K must be >= 1");
  check_prob(p_msg, "p_msg");
  double ok = 1.0 - p_msg;
  double q = 1.0 - ok * ok * ok;
  if (q >= 1.0) throw DivergesAtOne();
  double frames = K * q + K * q * (q / (1.0 - q)) * (1.0 + psi) / 2.0;
  return 3.0 * K + 1 + 3.0 * frames;
}

std::vector<ConvergenceRow> convergence_table(const std::vector<int>& ks, const std::vector<double>& betas,
                                              const std::vector<double>& radii, const LinkModelParams& base,
                                              int psi) {
  std::vector<ConvergenceRow> rows;
  for (double beta : betas)
    for (double r : radii)
      for (int k : ks) {
        LinkModelParams link = base;
        link.snr_threshold_db = beta;
        auto cp = params_from_link(k, r, link, psi);
        ConvergenceRow row;
        row.K = k;
        row.beta_db = beta;
        row.R_p = r;
        row.printed = mean_convergence(cp);
        row.corrected = corrected_mean_convergence(k, psi, row.printed.outage);
        rows.push_back(row);
      }
  return rows;
}

std::string convergence_table_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "K,beta_db,R_p,outage,p_fail,ideal,first_retx,higher_retx,printed_total,corrected_total\n";
  for (const auto& r : rows)
    os << r.K << ',' << r.beta_db << ',' << r.R_p << ',' << r.printed.outage << ',' << r.printed.p_fail << ','
       << r.printed.ideal << ',' << r.printed.first << ',' << r.printed.higher << ',' << r.printed.total << ','
       << r.corrected << '\n';
  return os.str();
}

}  // namespace gallop
