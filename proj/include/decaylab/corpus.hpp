#pragma once

#include "decaylab/measure.hpp"

namespace decaylab::corpus {

// Standard test systems used across the suites.

// middle-thirds pair {x/3, x/3 + 2/3}, constant derivative 1/3
inline Ifs cantor() {
  return validate_ifs({make_affine(1.0 / 3.0, 0.0), make_affine(1.0 / 3.0, 2.0 / 3.0)});
}

// Gauss-map inverse branches {1/(2+x), 1/(4+x)}
inline Ifs gauss24() { return validate_ifs({make_moebius(2.0), make_moebius(4.0)}); }

// {x/2, x/2 + 1/2}: the uniform measure on [0,1] for p = (1/2, 1/2)
inline Ifs dyadic() {
  return validate_ifs({make_affine(0.5, 0.0), make_affine(0.5, 0.5)});
}

// orientation-preserving non-linear pair with separated images and an
// attractor hull strictly inside (0,1)
inline Ifs nonlin2() {
  return validate_ifs(
      {make_quadratic(0.3, 0.1, 0.08), make_quadratic(0.35, 0.55, 0.05)});
}

// affine pair with hull strictly inside (0,1); lattice increments
inline Ifs cantor_inner() {
  return validate_ifs({make_affine(1.0 / 3.0, 0.1), make_affine(1.0 / 3.0, 0.55)});
}

// four separated affine branches with a comfortable endpoint margin; the
// parent of choice for partition and model tests at moderate scales
inline Ifs cantor4() {
  return validate_ifs({make_affine(0.15, 0.08), make_affine(0.15, 0.32),
                       make_affine(0.15, 0.56), make_affine(0.15, 0.78)});
}

inline std::vector<double> uniform_p(int n) {
  return std::vector<double>(static_cast<size_t>(n), 1.0 / n);
}

inline SelfConformalMeasure cantor_measure() { return make_measure(cantor(), uniform_p(2)); }
inline SelfConformalMeasure gauss24_measure() { return make_measure(gauss24(), uniform_p(2)); }
inline SelfConformalMeasure uniform_measure() { return make_measure(dyadic(), uniform_p(2)); }
inline SelfConformalMeasure nonlin2_measure() { return make_measure(nonlin2(), uniform_p(2)); }

}  // namespace decaylab::corpus
