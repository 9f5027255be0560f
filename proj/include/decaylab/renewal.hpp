#pragma once

#include <map>

#include "decaylab/constants.hpp"
#include "decaylab/measure.hpp"

namespace decaylab {

// One trajectory of the derivative-cocycle walk S_n = -log|f'_{w|n}(x_{sigma^n w})|
// stopped at level k, with the beta stopping time of the fixed-base-point
// derivative and the conditioning tail prefix.
struct WalkSample {
  std::vector<int> prefix;    // word symbols up to tau_k + tail
  std::vector<double> path;   // S_1 .. S_{tau_k}
  int tau = 0;                // first n with S_n >= k
  double s_tau = 0.0;
  int beta = 0;               // first m with |f'_{w|m}(x0)| < e^{-k - eps k / 8}
  std::vector<int> tail;      // first t symbols of sigma^{tau_k} w
  double k_level = 0.0;
};

inline constexpr double kRenewalDefaultEps = kStripEps;

struct WalkOptions {
  double eps = kRenewalDefaultEps;  // strip constant entering beta_k
  int tail_symbols = 4;             // conditioning prefix length
  int coding_depth = 0;             // 0 = derived from rho for 1e-9 truncation
};

WalkSample walk_sample(const SelfConformalMeasure& nu, double k, uint64_t seed,
                       const WalkOptions& opts = {});

// Rf(z, t) = sum_n int f(f_w(z), c(w, z) - t) dp^n(w), evaluated by exact
// word enumeration pruned on the cocycle (terms vanish once c > t + sup
// supp_x f). For budgets past the cap an importance-free Monte Carlo over
// trajectories takes over.
struct RenewalValue {
  double value = 0.0;
  double stderr_value = 0.0;   // zero for the exact path
  long long terms = 0;
  bool exact = true;
};

RenewalValue renewal_apply(const SelfConformalMeasure& nu,
                           const std::function<double(double, double)>& f, double x_lo,
                           double x_hi, double z, double t,
                           long long enumeration_cap = 10'000'000,
                           long long mc_trajectories = 200'000, uint64_t seed = 1);

// (1/chi) int int_{-t}^inf f(y, u) du dnu(y) with Monte Carlo error bars
struct RenewalLimit {
  double value = 0.0;
  double stderr_value = 0.0;
  double chi = 0.0;
};

RenewalLimit renewal_limit(const SelfConformalMeasure& nu,
                           const std::function<double(double, double)>& f, double x_lo,
                           double x_hi, double t, long long n_mc, uint64_t seed);

// law of the cocycle increment X_1 = -log f'_{w_1}(x_{sigma w})
std::vector<double> increment_samples(const SelfConformalMeasure& nu, long long n, int depth,
                                      uint64_t seed);

struct LatticeInfo {
  bool lattice = false;
  double span = 0.0;    // lattice spacing when detected
  double base = 0.0;
};

// flags increment laws concentrated on an arithmetic progression
LatticeInfo detect_lattice(const std::vector<double>& increments, double tol = 1e-9);

struct ResidueBin {
  std::vector<int> tail;
  long long count = 0;
  double estimate = 0.0;  // E(g(S_tau - k) | tail prefix)
  double stderr_value = 0.0;
};

struct ResidueReport {
  std::vector<ResidueBin> bins;
  double unconditional = 0.0;
  double unconditional_stderr = 0.0;
  double e_c_one = 0.0;          // E_C(1): crossing count per trajectory
  double limit = 0.0;            // (1/chi) E_kappa int_0^Y g
  double limit_stderr = 0.0;
  double chi_hat = 0.0;
};

// Bins overshoot samples by the first tail symbols and estimates the
// conditional expectations next to the renewal limit.
ResidueReport residue_cutoff(const SelfConformalMeasure& nu,
                             const std::function<double(double)>& g, double k, long long n_mc,
                             uint64_t seed, const WalkOptions& opts = {});

struct EquidistributionPoint {
  double k = 0.0;
  double error = 0.0;        // bin-weighted RMS deviation from the limit
  double noise_floor = 0.0;  // same aggregation of the per-bin standard errors
  double limit = 0.0;
};

struct EquidistributionReport {
  std::vector<EquidistributionPoint> points;
  double rate = 0.0;          // fitted r in e(k) ~ e^{-r k} over resolvable points
  double rate_stderr = 0.0;
  bool rate_valid = false;
};

// e(k) against the renewal limit over a list of levels with an exponential
// rate fit; lattice increment laws abort with LatticeDetected.
EquidistributionReport equidistribution_test(const SelfConformalMeasure& nu,
                                             const std::function<double(double)>& g,
                                             const std::vector<double>& k_list, long long n_mc,
                                             uint64_t seed, const WalkOptions& opts = {});

// the even bump psi(x) = C0 exp(-1/(1-x^2)) scaled to support [-d^2, d^2]
struct Mollifier {
  double delta = 0.0;
  double c0 = 0.0;

  double operator()(double x) const;       // psi_delta(x)
  static double normalization();           // C0 with int psi = 1
};

struct GridFunction {
  double x0 = 0.0;
  double h = 0.0;
  std::vector<double> values;

  double integral() const;  // trapezoid
};

// convolution with psi_delta by quadrature on the grid
GridFunction mollify(const GridFunction& f, double delta);

}  // namespace decaylab
