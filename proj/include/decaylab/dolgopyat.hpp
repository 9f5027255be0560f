#pragma once

#include "decaylab/partition.hpp"

namespace decaylab {

// positive C^1 function with its derivative; cone membership means
// H > 0 and |H'| <= A|b| H
struct ConeFunction {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
};

// complex C^1 test function dominated by a cone element
struct TestFunction {
  std::function<std::complex<double>(double)> value;
  std::function<std::complex<double>(double)> deriv;
};

struct DolgopyatOptions {
  double cone_a = 0.0;        // 0 = default max(2, 4 * analytic slope bound)
  double theta = 0.125;       // damping, the proof wants theta <= 1/8
  double eps_prime = 1.0;     // partition modulus is eps' / |b|
  int cell_grid = 17;         // per-cell points for the Theta test
  int check_grid = 257;       // global grid for cone/domination checks
  long long mc_samples = 100000;
  uint64_t seed = 1;
  bool allow_eps_fallback = true;  // halve eps' once when no cell qualifies
  bool require_damping = true;     // empty selection is an error when set
  double min_cut_gap = -1.0;       // partition gap floor; negative = cone-derived
};

struct DolgopyatRecord {
  std::vector<std::pair<int, int>> selected;  // (branch i, cell j) in J
  bool dense = false;
  double theta = 0.0;
  double eps_prime = 0.0;
  double cone_a = 0.0;
  double a3_measured = 0.0;        // sup ||chi_j'|| * eps' / |b|
  double cone_margin = 0.0;        // min over grid of A|b| G - |G'|, G = N_s^J H
  double domination_margin = 0.0;  // min over grid of N_s^J H - |P_{s,omega,N} f|
  double deriv_domination_margin = 0.0;
  double l2_ratio = 0.0;           // int |N_s^J H|^2 dmu / int P_{0,omega,N}(H^2) dmu
  double l2_ratio_stderr = 0.0;
  double njh_sup = 0.0;            // max of N_s^J H on the check grid
  TriadicPartition partition;

  bool cone_stable() const { return cone_margin >= 0.0; }
  bool dominated() const { return domination_margin >= 0.0 && deriv_domination_margin >= 0.0; }
};

// Builds the damped operator N_s^J = P_{a,omega,N}(chi_J *) from the triadic
// partition of K_{sigma^N omega}, selects the cells where a Theta function
// certifies cancellation, and verifies cone stability, pointwise domination
// of P_{s,omega,N} f, and the L^2 contraction against mu_{sigma^N omega}.
DolgopyatRecord dolgopyat_apply(const RandomModel& model, const OmegaPrefix& omega,
                                std::complex<double> s, int n_level, const TestFunction& f,
                                const ConeFunction& h, const DolgopyatOptions& opts = {});

// default cone parameter max(2, 4 * sup-slope / (1 - rho))
double default_cone_a(const SelfConformalMeasure& nu);

}  // namespace decaylab
