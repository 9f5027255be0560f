#pragma once

#include <array>

#include "decaylab/ifs.hpp"

namespace decaylab {

// d/dx log|f_w'(x)|, accumulated along the chain-rule expansion
// sum_j (f''/f')(inner composite) * (inner derivative)
double word_log_deriv_slope(const Ifs& ifs, const Word& w, double x);

// d/dx ( log|f_{w1}'| - log|f_{w2}'| )(x); vanishes identically on affine
// families and is the quantitative non-linearity functional everywhere else
double uni_functional(const Ifs& ifs, const Word& w1, const Word& w2, double x);

struct GridBounds {
  double min_abs;
  double max_abs;
};

GridBounds uni_bounds(const Ifs& ifs, const Word& w1, const Word& w2, int grid = 1024);

struct UniSearchBudget {
  int max_generation = 12;      // largest induced generation N to try
  int seed_depth = 3;           // seed pairs scanned up to this word length
  int grid = 1024;              // grid for functional bounds
  double zero_tol = 1e-9;       // "identically zero" threshold
  long long alphabet_cap = 4096;
};

struct UniQuadruple {
  int generation = 0;                       // N
  std::array<Word, 4> words;                // base words of f1..f4
  std::array<long long, 4> induced_index;   // lexicographic index in Phi^N
  Word seed_w1, seed_w2;                    // seed pair carrying the UNI bound
  double m_seed = 0.0, m_prime_seed = 0.0;  // seed-pair |functional| bounds on the grid
  double m_quad = 0.0, m_prime_quad = 0.0;  // bounds for pairs (f1,f2) and (f3,f4)
  double separation_gap = 0.0;              // min pairwise distance of the four images
  double separation_target = 0.0;           // 3 * rho^N
};

// Search for an induced generation and four maps with disjoint images and a
// two-sided bound on the pair functionals. Follows the constructive route:
// seed pair from a depth-limited scan, prefix pair with the distance test,
// and eta words from the codes of the attractor hull endpoints; candidates
// failing the target inequalities are re-verified and rejected directly.
UniQuadruple find_uni_quadruple(const Ifs& ifs, const UniSearchBudget& budget = {});

// prefix of the coding of the attractor hull's left/right endpoint
Word hull_endpoint_code(const Ifs& ifs, bool left, int depth);

}  // namespace decaylab
