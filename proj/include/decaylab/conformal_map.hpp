#pragma once

#include <string>
#include <variant>
#include <vector>

#include "decaylab/errors.hpp"

namespace decaylab {

// A strictly monotone C^2 contraction of [0,1]. Supported parametric
// families:
//   affine(a, b)       x -> a*x + b
//   moebius(a)         x -> 1/(a+x), a > 1
//   quadratic(a, b, c) x -> b + a*x + c*x^2
// plus finite compositions of the above. Evaluators return value, first
// and second derivative in one pass.
class ConformalMap {
 public:
  struct Eval {
    double value;
    double d1;
    double d2;
  };

  struct Affine {
    double slope, offset;
  };
  struct Moebius {
    double a;
  };
  struct Quadratic {
    double a, b, c;
  };
  struct Composite {
    std::vector<ConformalMap> factors;  // outermost first: f = factors[0] o factors[1] o ...
  };

  ConformalMap() : impl_(Affine{0.5, 0.0}) {}
  explicit ConformalMap(Affine a) : impl_(a) {}
  explicit ConformalMap(Moebius m) : impl_(m) {}
  explicit ConformalMap(Quadratic q) : impl_(q) {}
  explicit ConformalMap(Composite c) : impl_(std::move(c)) {}

  Eval eval(double x) const;
  double operator()(double x) const { return eval(x).value; }
  double deriv(double x) const { return eval(x).d1; }
  double second_deriv(double x) const { return eval(x).d2; }

  // d/dx log|f'|(x) = f''(x)/f'(x)
  double log_deriv_slope(double x) const {
    Eval e = eval(x);
    return e.d2 / e.d1;
  }

  // strictly monotone on [0,1]; solves f(x) = y by bisection
  double inverse(double y, double lo = 0.0, double hi = 1.0) const;

  bool orientation_preserving() const { return deriv(0.5) > 0.0; }
  bool is_affine() const { return std::holds_alternative<Affine>(impl_); }

  std::string kind() const;
  std::vector<double> params() const;

  const std::variant<Affine, Moebius, Quadratic, Composite>& impl() const { return impl_; }

 private:
  std::variant<Affine, Moebius, Quadratic, Composite> impl_;
};

// Builds a map from a parametric description and checks the type
// invariants on a validation grid:
//   - f([0,1]) inside [0,1]            (NotSelfMap)
//   - 0 < inf|f'| <= sup|f'| < 1       (NotAContraction / DegenerateDerivative)
//   - f' of constant sign              (DegenerateDerivative)
ConformalMap build_map(const std::string& kind, const std::vector<double>& params);

ConformalMap make_affine(double slope, double offset);
ConformalMap make_moebius(double a);
ConformalMap make_quadratic(double a, double b, double c);

// composition g = maps[0] o maps[1] o ... (no re-validation; callers
// compose maps that already passed build_map)
ConformalMap compose(std::vector<ConformalMap> maps);

struct DerivBounds {
  double inf_abs;  // inf |f'| over [0,1]
  double sup_abs;  // sup |f'| over [0,1]
};

// grid scan (2^12 nodes by default) with golden-section refinement of the
// bracketing cells until the bounds stabilize to rtol 1e-10
DerivBounds derivative_bounds(const ConformalMap& f, int grid = 4096, double rtol = 1e-10);

void validate_map_invariants(const ConformalMap& f);

}  // namespace decaylab
