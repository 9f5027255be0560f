#pragma once

#include <cmath>
#include <vector>

#include "decaylab/conformal_map.hpp"

namespace decaylab {

// Finite symbol sequence over {0, ..., n-1}; index 0 is the outermost map
// in compositions, so f_w = f_{w[0]} o f_{w[1]} o ... o f_{w[m-1]}.
using Word = std::vector<int>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double diam() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

inline double interval_dist(const Interval& a, const Interval& b) {
  if (a.hi < b.lo) return b.lo - a.hi;
  if (b.hi < a.lo) return a.lo - b.hi;
  return 0.0;
}

// A validated uniformly contracting IFS on [0,1] with its standing
// constants:
//   rho      = sup |f'|          rho_min = min inf |f'|
//   D        = min(-log|f'|)     Dprime  = max(-log|f'|)
// plus the attractor hull (fixed interval of J -> hull(U f_i(J))) and the
// coding base point x0 = hull midpoint.
struct Ifs {
  std::vector<ConformalMap> maps;
  double rho = 0.0;
  double rho_min = 0.0;
  double D = 0.0;
  double Dprime = 0.0;
  Interval hull;       // convex hull of the attractor
  double x0 = 0.5;     // coding base point
  double log_deriv_slope_sup = 0.0;  // sup_a || (log|f_a'|)' ||_inf

  int alphabet() const { return static_cast<int>(maps.size()); }
  bool orientation_preserving() const;
  bool all_orientation_reversing() const;

  // analytic distortion bound exp(sup_a ||(log f_a')'|| / (1 - rho))
  double distortion_bound() const { return std::exp(log_deriv_slope_sup / (1.0 - rho)); }
  double endpoint_margin() const { return std::min(hull.lo, 1.0 - hull.hi); }
};

struct IfsOptions {
  bool require_endpoint_margin = false;  // reject attractors touching {0,1}
  int grid = 4096;
  double rtol = 1e-10;
};

// Validates >= 2 maps, distinct fixed points, computes the constants by
// grid + golden-section refinement, and locates the attractor hull.
Ifs validate_ifs(std::vector<ConformalMap> maps, const IfsOptions& opts = {});

// f_w as a single ConformalMap (outermost symbol first)
ConformalMap compose_word(const Ifs& ifs, const Word& w);

// f_w([0,1]) from the endpoint images (valid by monotonicity)
Interval cylinder_interval(const Ifs& ifs, const Word& w);

struct DistortionReport {
  double measured;  // sup over sampled words and grid pairs of |f_w'(x)| / |f_w'(y)|
  double analytic;  // exp(sup_a ||(log f_a')'|| / (1 - rho))
};

// Sampled-word distortion constant, monotone non-decreasing in max_depth.
// All words are enumerated while n + n^2 + ... stays below word_cap; beyond
// that depth, words are sampled pseudo-randomly (seeded).
DistortionReport distortion_constant(const Ifs& ifs, int max_depth, int grid = 64,
                                     long long word_cap = 20000, uint64_t seed = 7);

struct InducedIfs {
  Ifs ifs;
  std::vector<Word> labels;  // labels[i] = base word of induced map i (lexicographic)
  int generation = 1;
};

// All length-N composites in lexicographic word order.
InducedIfs induce(const Ifs& ifs, int generation, long long alphabet_cap = 4096);

}  // namespace decaylab
