#pragma once

#include <optional>

#include "decaylab/cheb.hpp"
#include "decaylab/measure.hpp"
#include "decaylab/rational.hpp"
#include "decaylab/uni.hpp"

namespace decaylab {

// One sub-IFS of the disintegration: 2 or 3 parent maps, the UNI pair
// first, with its conditional probability vector.
struct ModelFamily {
  std::vector<int> member;          // parent symbol indices
  std::vector<double> ptilde;
  std::vector<Rat> ptilde_exact;    // populated on the rational path
};

// The Bernoulli disintegration model: families Phi_i, selection vector q,
// per-family vectors ptilde, all referencing a prepared parent measure
// whose first four maps are the separated UNI quadruple.
struct RandomModel {
  SelfConformalMeasure parent;
  std::vector<ModelFamily> families;
  std::vector<double> q;
  std::vector<Rat> q_exact;
  bool exact = false;               // rational bookkeeping available
  std::vector<int> multiplicity;    // n_a = number of families containing map a
  double sep_min = 0.0;             // min image gap within any family
  double m_uni = 0.0;               // min over families of the pair functional lower bound
  double m_prime_uni = 0.0;

  int family_count() const { return static_cast<int>(families.size()); }
  double marginal_residual() const;  // max_a |sum_j q_j ptilde_j(a) - p_a|
};

// Builds the model from a parent whose maps 1..4 satisfy the separation and
// UNI properties (as produced by prepare_model_parent). When p_exact is
// given, q and ptilde are also derived in exact rational arithmetic.
RandomModel build_model(const SelfConformalMeasure& parent,
                        const std::vector<Rat>& p_exact = {});

struct PreparedParent {
  SelfConformalMeasure parent;   // induced measure, quadruple-first ordering
  std::vector<Word> labels;      // base-alphabet word per parent symbol
  std::vector<Rat> p_exact;      // induced weights when the base p was rational
  UniQuadruple quad;
};

// Induces the base measure to the quadruple's generation and reorders the
// alphabet so the four UNI maps come first.
PreparedParent prepare_model_parent(const SelfConformalMeasure& base, const UniQuadruple& quad,
                                    const std::vector<Rat>& base_p_exact = {},
                                    long long alphabet_cap = 4096);

using OmegaPrefix = std::vector<int>;

OmegaPrefix sample_omega_prefix(const RandomModel& model, int length, Rng& rng);

// weights eta^(omega)(I) over X_n^(omega); I is per-family member indices
double omega_word_weight(const RandomModel& model, const OmegaPrefix& omega,
                         const std::vector<int>& word);

// the composed map f_I^(omega) evaluated with first and log derivatives
struct OmegaMapEval {
  double value;
  double deriv;
  double log_deriv_slope;  // d/dx log|f_I'|(x)
};
OmegaMapEval eval_omega_word(const RandomModel& model, const OmegaPrefix& omega,
                             const std::vector<int>& word, double x);

// draws from mu_omega by truncating the coding map at `depth`
std::vector<double> sample_mu_omega(const RandomModel& model, const OmegaPrefix& omega, int depth,
                                    long long count, uint64_t seed);

// P_{s,omega,N}(g)(x) for a callable g
std::complex<double> local_transfer_apply(const RandomModel& model, const OmegaPrefix& omega,
                                          int n_steps, std::complex<double> s,
                                          const std::function<std::complex<double>(double)>& g,
                                          double x);

// grid-to-grid application with barycentric interpolation of g
Eigen::VectorXcd apply_local_transfer(const RandomModel& model, const OmegaPrefix& omega,
                                      int n_steps, std::complex<double> s, const ChebGrid& grid,
                                      const Eigen::VectorXcd& g_values);

// max over x_grid of |P_s^N g - sum_omega Q([omega]) P_{s,omega,N} g|
double check_operator_disintegration(const RandomModel& model, std::complex<double> s, int n_steps,
                                     const std::function<std::complex<double>(double)>& g,
                                     const std::vector<double>& x_grid,
                                     long long enumeration_cap = 10'000'000);

// Monte Carlo Fourier transform of nu sampled through the model
// decomposition (omega ~ Q, then mu_omega)
FourierEstimate model_fourier_mc(const RandomModel& model, double q, long long n_samples,
                                 int depth, uint64_t seed);

struct FedererProbe {
  double x;
  double r;
  double mass_inner;
  double mass_outer;
  double ratio;
  double ratio_stderr;
};

struct FedererReport {
  double c_hat = 0.0;  // max ratio over admissible probes
  std::vector<FedererProbe> probes;
  long long samples = 0;
};

// Empirical doubling constant of mu_omega: mass(B(x, D r)) / mass(B(x, r))
// maximized over sampled support points and the radius grid.
FedererReport federer_constant(const RandomModel& model, const OmegaPrefix& omega, double d_factor,
                               const std::vector<double>& r_grid, int probe_points, int depth,
                               long long n_samples, uint64_t seed, long long min_count = 200);

}  // namespace decaylab
