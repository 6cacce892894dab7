#pragma once

#include <string>
#include <vector>

#include "gallop/channel.hpp"
#include "gallop/types.hpp"

namespace gallop {

struct DivergesAtOne : Error {
  DivergesAtOne() : Error("higher-retransmission delay diverges at p_fail = 1") {}
};

struct ConvergenceParams {
  int K = 1;
  double R_p = 30.0;
  double alpha = 3.3;
  double zeta = 0.0;  // linear, distance in meters
  int psi = 4;
  void validate() const;
};

// Parameters from a link model: alpha and zeta follow the path-loss law of the channel module.
ConvergenceParams params_from_link(int K, double R_p, const LinkModelParams& link, int psi = 4);

// Density of the distance to the k-th nearest of K children uniform in a disk of radius R_p.
double distance_pdf(double d, int k, int K, double R_p);

// Mean Rayleigh outage of a link whose length is uniform over the disk (integral form).
double signaling_outage(double R_p, double alpha, double zeta);
// Same expectation taken over the k-th order-statistic distance.
double signaling_outage_kth(int k, int K, double R_p, double alpha, double zeta);

double allocation_failure(double p_rfs, double p_asgn, double p_dls);
double mean_first_retx_delay(int K, double p_fail);
double mean_higher_retx_delay(int K, int psi, double p_fail);

struct ConvergenceBreakdown {
  double outage = 0.0;   // per signaling message
  double p_fail = 0.0;   // allocation failure
  double ideal = 0.0;    // 3K + 1
  double first = 0.0;    // first-retransmission term
  double higher = 0.0;   // second-and-higher term
  double total = 0.0;
};

// Ideal count plus both delay terms, with one outage value for RFS, ASGN and DLS.
ConvergenceBreakdown mean_convergence(const ConvergenceParams& p);
// Same with an externally chosen allocation-failure probability.
double mean_convergence_at(int K, int psi, double p_fail);

// Not the printed model: retries counted as geometric attempts. A child misses its first
// handshake with q = 1 - (1 - p_dls)(1 - p_rfs)(1 - p_asgn); each miss appends one signaling
// frame after the K scheduled ones, and each further miss waits (1 + psi)/2 frames on average.
double corrected_mean_convergence(int K, int psi, double p_msg);

struct ConvergenceRow {
  int K = 0;
  double beta_db = 0.0;
  double R_p = 0.0;
  ConvergenceBreakdown printed;
  double corrected = 0.0;
};

std::vector<ConvergenceRow> convergence_table(const std::vector<int>& ks, const std::vector<double>& betas,
                                              const std::vector<double>& radii, const LinkModelParams& base,
                                              int psi = 4);
std::string convergence_table_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace gallop
