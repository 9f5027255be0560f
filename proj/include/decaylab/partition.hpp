#pragma once

#include "decaylab/random_model.hpp"

namespace decaylab {

// Geometric queries against K_omega through its cylinder tree. Cylinders of
// generation d are the images f_{u_1}^{(omega_1)} o ... o f_{u_d}^{(omega_d)}([0,1]);
// by the model's separation property they are nested with positive gaps.
class OmegaCylinders {
 public:
  OmegaCylinders(const RandomModel& model, OmegaPrefix omega, double resolution = 1e-12);

  Interval cylinder(const std::vector<int>& word) const;
  Interval hull() const;  // first-generation hull of K_omega

  bool intersects(double lo, double hi) const;          // K_omega hits [lo,hi]?
  double distance_to(double x) const;                   // dist(x, K_omega) up to resolution
  std::optional<double> point_in(double lo, double hi) const;  // some K_omega point
  // conv(K in [lo,hi]); endpoints resolved to res (0 = window-relative)
  std::optional<Interval> attractor_range_in(double lo, double hi, double res = 0.0) const;

  // minimal-generation cylinder containing x inside B(x, r); x must lie
  // within `resolution` of K_omega
  std::optional<std::vector<int>> cylinder_in_ball(double x, double r) const;

  // child cylinders of `word` two generations down, sorted by position
  std::vector<Interval> grandchildren(const std::vector<int>& word) const;

  // K_omega inside [lo,hi] as maximal blobs: cylinder pieces resolved down
  // to `res` and re-merged across gaps narrower than `res`
  std::vector<Interval> clusters_in(double lo, double hi, double res) const;

  int max_depth() const { return static_cast<int>(omega_.size()); }

 private:
  const RandomModel& model_;
  OmegaPrefix omega_;
  double resolution_;

  const ModelFamily& family_at(int depth) const {
    return model_.families[static_cast<size_t>(omega_[static_cast<size_t>(depth)])];
  }
};

struct TriadicPartition {
  std::vector<Interval> cells;        // ordered cover of [0,1], disjoint interiors
  std::vector<char> meets_attractor;  // per cell
  double a1_prime = 0.0;              // min |V| / eps
  double a1 = 0.0;                    // max |V| / eps
  double a2 = 0.0;                    // min over meeting cells of dist(bdry, K)/|V|
  double eps = 0.0;
  bool triple_property = false;       // every meeting cell has two meeting neighbours nearby
};

// The endpoint-adjusted triadic partition: uniform cells of modulus eps,
// cut points moved into attractor gaps, cells meeting K_omega split across
// the widest internal gaps so the pieces each keep a share of K_omega.
// Requires the K_omega margin from {0,1} to exceed the cell scale.
//
// min_cut_gap floors the gaps a cut may pass through. Deeply induced models
// carry cylinder gaps that collapse geometrically with the generation;
// below the floor a blob of K_omega is left in one piece instead of being
// split through an unresolvable gap (the cutoff machinery downstream needs
// boundary clearance it can ramp over). Zero means the resolution is tied
// to the cell scale.
TriadicPartition triadic_partition(const RandomModel& model, const OmegaPrefix& omega, double eps,
                                   double min_cut_gap = 0.0);

}  // namespace decaylab
