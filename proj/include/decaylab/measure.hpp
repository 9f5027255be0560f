#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "decaylab/ifs.hpp"
#include "decaylab/rng.hpp"

namespace decaylab {

// Self-conformal measure: an IFS together with a strictly positive
// probability vector. All sampling and Fourier estimation runs off this
// immutable value.
struct SelfConformalMeasure {
  Ifs ifs;
  std::vector<double> p;

  int alphabet() const { return ifs.alphabet(); }
};

SelfConformalMeasure make_measure(Ifs ifs, std::vector<double> p);

struct FourierEstimate {
  double q = 0.0;
  std::complex<double> value;
  double error_bound = 0.0;   // deterministic truncation bound (cylinder method)
  double stderr_re = 0.0;     // per-component standard errors (Monte Carlo method)
  double stderr_im = 0.0;
  std::string method;         // "cylinder" | "mc"
  int depth = 0;

  double stderr_combined() const { return std::hypot(stderr_re, stderr_im); }
};

// Points f_w(x0) with w drawn coordinatewise i.i.d. from p, |w| = depth.
std::vector<double> sample_points(const SelfConformalMeasure& nu, long long count, int depth,
                                  uint64_t seed);

// Deterministic estimator: sum over all depth-m cylinders of
// p_w * exp(2 pi i q f_w(x0)) with m chosen so that 2 pi |q| rho^m <= tol.
// Enumeration cost n^m is guarded by leaf_cap.
FourierEstimate fourier_cylinder(const SelfConformalMeasure& nu, double q, double tol,
                                 long long leaf_cap = 10'000'000);

// Monte Carlo estimator: empirical mean of exp(2 pi i q X) over sampled
// points, standard errors per component.
FourierEstimate fourier_mc(const SelfConformalMeasure& nu, double q, long long n_samples,
                           int depth, uint64_t seed);

struct DecayBlock {
  double q_lo = 0.0;
  double q_hi = 0.0;
  double sup_modulus = 0.0;
  double q_at_sup = 0.0;
};

struct DecayReportMeasure {
  std::vector<DecayBlock> blocks;
  double alpha_hat = 0.0;   // minus the fitted slope of log sup vs log q
  double fit_residual = 0.0;
  double tol = 1e-4;
};

// Partitions [q_min, q_max] into `blocks` geometric blocks, records the sup
// of |F_q| over >= samples_per_block frequencies per block (log-spaced,
// block endpoints and nearby integers included), and fits a power law.
DecayReportMeasure decay_exponent(const SelfConformalMeasure& nu, double q_min, double q_max,
                                  int blocks, int samples_per_block = 64, double tol = 1e-4,
                                  long long leaf_cap = 10'000'000);

struct FrostmanReport {
  std::vector<double> r;
  std::vector<double> sup_mass;
  double d_hat = 0.0;
};

// sup_y nu(B_r(y)) estimated by a sliding window over sorted samples;
// d_hat is the log-log slope.
FrostmanReport frostman_exponent(const SelfConformalMeasure& nu, std::vector<double> r_grid,
                                 long long n_samples, uint64_t seed, int depth = 32);

struct LyapunovEstimate {
  double chi = 0.0;
  double stderr_value = 0.0;
};

// Monte Carlo mean of -log|f_a'(x)| with a ~ p and x ~ nu.
LyapunovEstimate lyapunov(const SelfConformalMeasure& nu, long long n_samples, int depth,
                          uint64_t seed);

// Deterministic companion: the same integral through depth-m cylinder
// weights; error <= C rho^m.
double lyapunov_cylinder(const SelfConformalMeasure& nu, int depth,
                         long long leaf_cap = 10'000'000);

// integral of h against nu through depth-m cylinder weights
double integrate_cylinder(const SelfConformalMeasure& nu, const std::function<double(double)>& h,
                          int depth, long long leaf_cap = 10'000'000);

}  // namespace decaylab
