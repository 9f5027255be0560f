#pragma once

#include "decaylab/renewal.hpp"

namespace decaylab {

// Parameter schedule of the decay argument: k(q) solves |q| = e^{k + k
// eps/7}, the mollification radius is r = e^{-k eps/100}, beta = 1/2, and
// the three error terms are the closed-form exponentials in k.
struct ScheduleEntry {
  double q = 0.0;
  double k = 0.0;
  double r = 0.0;
  double beta = 0.5;
  double pred_linearization = 0.0;   // e^{k eps (1/7 - 1/8 - 1/16)}
  double pred_equidistribution = 0.0;  // e^{-eps k/2 + 3 k eps/7}
  double pred_oscillatory = 0.0;     // e^{k eps (1/100 - 1/7 + 1/8)}

  // decay rates in k (positive numbers)
  static double lin_rate(double eps) { return eps * (1.0 / 8.0 + 1.0 / 16.0 - 1.0 / 7.0); }
  static double equi_rate(double eps) { return eps * (1.0 / 2.0 - 3.0 / 7.0); }
  static double osc_rate(double eps) { return eps * (1.0 / 7.0 - 1.0 / 8.0 - 1.0 / 100.0); }
};

std::vector<ScheduleEntry> schedule(const std::vector<double>& q_list, double eps);

struct LinearizationGap {
  double q = 0.0;
  double k = 0.0;
  double lhs = 0.0;             // |F_q(nu)|^2
  double rhs_mc = 0.0;          // MC mean of the pushed-measure transforms
  double rhs_stderr = 0.0;
  double error_term = 0.0;      // printed term |q| e^{-(k + k eps/8) - beta k eps/8}
  double slack = 0.0;           // rhs_mc + error_term - lhs
  double c_prime = 0.0;         // fitted bracket constant of the derivative pinch
  long long samples = 0;
};

// Monte Carlo check of the linearization inequality
//   |F_q(nu)|^2 <= E_omega |F_q(M_{e^{-S_tau}} o f_{w|tau+1..beta} nu)|^2 + error
// including the per-sample derivative bracket |f'| = Theta(e^{-eps k/8}).
// Orientation-reversing families are handled through their second-generation
// induction (same measure, increasing branches); mixed orientation is
// rejected.
LinearizationGap linearization_gap(const SelfConformalMeasure& nu, double q, double k,
                                   long long n_mc, uint64_t seed, double eps = kRenewalDefaultEps,
                                   long long leaf_cap = 50'000'000);

struct OscillatoryBound {
  double q = 0.0;
  double k = 0.0;
  double r = 0.0;
  double integral_estimate = 0.0;  // int_0^{D'} |F_q(M_{e^{-t-k}} o f_w nu)|^2 dt
  double integral_stderr = 0.0;
  double bound_value = 0.0;        // 1/(r |q| e^{-(k + eps k/8)}) + sup-mass(r)
  double sup_mass = 0.0;
};

OscillatoryBound oscillatory_bound(const SelfConformalMeasure& nu, double q, double k, double r,
                                   long long n_mc, uint64_t seed,
                                   double eps = kRenewalDefaultEps);

// sup_y nu(B_r(y)) by the sorted-sample sliding window
double sup_ball_mass(const SelfConformalMeasure& nu, double r, long long n_samples, uint64_t seed);

struct DecayTermRow {
  std::string term;
  double predicted_rate = 0.0;
  double measured_rate = 0.0;
  bool pass = false;  // measured >= half predicted
};

struct DecayPipelineOptions {
  double q_min = 16.0;
  double q_max = 65536.0;
  int blocks = 12;
  int samples_per_block = 64;
  int scheduled_points = 6;
  long long lin_mc = 1500;
  long long osc_mc = 400;
  long long equi_mc = 200000;
  long long leaf_cap = 50'000'000;
  uint64_t seed = 1;
  double eps = kRenewalDefaultEps;
};

struct EpsSensitivityRow {
  double eps = 0.0;
  double alpha_hat = 0.0;  // the block-sup fit is eps-free by construction
  double lin_rate = 0.0;
  double equi_rate = 0.0;
  double osc_rate = 0.0;
};

struct DecayReportResult {
  bool lattice = false;
  double lattice_span = 0.0;
  DecayReportMeasure spectrum;
  double alpha_hat = 0.0;
  std::vector<ScheduleEntry> entries;
  std::vector<LinearizationGap> linearization;
  std::vector<OscillatoryBound> oscillatory;
  std::vector<EquidistributionPoint> equidistribution;
  std::vector<DecayTermRow> terms;
  double lin_pass_fraction = 1.0;  // share of scheduled points with slack >= -4 stderr
  std::vector<EpsSensitivityRow> eps_sensitivity;  // eps in {0.02, 0.05, 0.1}
};

// The end-to-end report: lattice detection, block-sup decay fit, the
// schedule, and the measured decay of every predicted error term.
DecayReportResult decay_report(const SelfConformalMeasure& nu,
                               const DecayPipelineOptions& opts = {});

}  // namespace decaylab
