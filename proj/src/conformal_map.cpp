#include "decaylab/conformal_map.hpp"

#include <algorithm>
#include <cmath>

namespace decaylab {

ConformalMap::Eval ConformalMap::eval(double x) const {
  struct Visitor {
    double x;
    Eval operator()(const Affine& m) const { return {m.slope * x + m.offset, m.slope, 0.0}; }
    Eval operator()(const Moebius& m) const {
      double u = m.a + x;
      double inv = 1.0 / u;
      return {inv, -inv * inv, 2.0 * inv * inv * inv};
    }
    Eval operator()(const Quadratic& m) const {
      return {m.b + (m.a + m.c * x) * x, m.a + 2.0 * m.c * x, 2.0 * m.c};
    }
    Eval operator()(const Composite& c) const {
      // fold innermost-first: (y, y', y'') of the partial composite
      Eval acc{x, 1.0, 0.0};
      for (auto it = c.factors.rbegin(); it != c.factors.rend(); ++it) {
        Eval g = it->eval(acc.value);
        acc = {g.value, g.d1 * acc.d1, g.d2 * acc.d1 * acc.d1 + g.d1 * acc.d2};
      }
      return acc;
    }
  };
  return std::visit(Visitor{x}, impl_);
}

double ConformalMap::inverse(double y, double lo, double hi) const {
  double flo = (*this)(lo), fhi = (*this)(hi);
  bool increasing = fhi > flo;
  double a = lo, b = hi;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (a + b);
    double v = (*this)(mid);
    if ((v < y) == increasing)
      a = mid;
    else
      b = mid;
    if (b - a < 1e-16) break;
  }
  return 0.5 * (a + b);
}

std::string ConformalMap::kind() const {
  struct Visitor {
    std::string operator()(const Affine&) const { return "affine"; }
    std::string operator()(const Moebius&) const { return "moebius"; }
    std::string operator()(const Quadratic&) const { return "quadratic"; }
    std::string operator()(const Composite&) const { return "composite"; }
  };
  return std::visit(Visitor{}, impl_);
}

std::vector<double> ConformalMap::params() const {
  struct Visitor {
    std::vector<double> operator()(const Affine& m) const { return {m.slope, m.offset}; }
    std::vector<double> operator()(const Moebius& m) const { return {m.a}; }
    std::vector<double> operator()(const Quadratic& m) const { return {m.a, m.b, m.c}; }
    std::vector<double> operator()(const Composite&) const { return {}; }
  };
  return std::visit(Visitor{}, impl_);
}

ConformalMap make_affine(double slope, double offset) {
  return ConformalMap(ConformalMap::Affine{slope, offset});
}
ConformalMap make_moebius(double a) { return ConformalMap(ConformalMap::Moebius{a}); }
ConformalMap make_quadratic(double a, double b, double c) {
  return ConformalMap(ConformalMap::Quadratic{a, b, c});
}

ConformalMap compose(std::vector<ConformalMap> maps) {
  ConformalMap::Composite c;
  c.factors.reserve(maps.size());
  for (auto& m : maps) {
    if (auto* inner = std::get_if<ConformalMap::Composite>(&m.impl())) {
      for (const auto& f : inner->factors) c.factors.push_back(f);
    } else {
      c.factors.push_back(std::move(m));
    }
  }
  return ConformalMap(std::move(c));
}

namespace {

// golden-section refinement of an extremum bracketed in [a, b]
template <typename F>
double golden_refine(F&& f, double a, double b, bool maximize, double rtol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  double prev = maximize ? std::max(fc, fd) : std::min(fc, fd);
  for (int it = 0; it < 200; ++it) {
    bool pick_left = maximize ? (fc > fd) : (fc < fd);
    if (pick_left) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
    double cur = maximize ? std::max(fc, fd) : std::min(fc, fd);
    if (std::abs(cur - prev) <= rtol * (std::abs(cur) + 1e-300) && it > 8) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace

DerivBounds derivative_bounds(const ConformalMap& f, int grid, double rtol) {
  auto absd = [&](double x) { return std::abs(f.deriv(x)); };
  double lo = absd(0.0), hi = lo;
  int ilo = 0, ihi = 0;
  for (int i = 1; i <= grid; ++i) {
    double v = absd(static_cast<double>(i) / grid);
    if (v < lo) {
      lo = v;
      ilo = i;
    }
    if (v > hi) {
      hi = v;
      ihi = i;
    }
  }
  auto bracket = [&](int i) {
    double a = std::max(0, i - 1) / static_cast<double>(grid);
    double b = std::min(grid, i + 1) / static_cast<double>(grid);
    return std::pair<double, double>{a, b};
  };
  auto [alo, blo] = bracket(ilo);
  auto [ahi, bhi] = bracket(ihi);
  double inf_ref = std::min(lo, golden_refine(absd, alo, blo, /*maximize=*/false, rtol));
  double sup_ref = std::max(hi, golden_refine(absd, ahi, bhi, /*maximize=*/true, rtol));
  return {inf_ref, sup_ref};
}

void validate_map_invariants(const ConformalMap& f) {
  const int grid = 1024;
  double sign = 0.0;
  for (int i = 0; i <= grid; ++i) {
    double x = static_cast<double>(i) / grid;
    double d = f.deriv(x);
    if (d == 0.0 || !std::isfinite(d)) fail(Errc::DegenerateDerivative, "f' vanishes on [0,1]");
    double s = d > 0 ? 1.0 : -1.0;
    if (sign == 0.0) sign = s;
    if (s != sign) fail(Errc::DegenerateDerivative, "f' changes sign on [0,1]");
  }
  DerivBounds b = derivative_bounds(f);
  if (b.sup_abs >= 1.0) fail(Errc::NotAContraction, "sup|f'| >= 1");
  if (b.inf_abs <= 0.0) fail(Errc::DegenerateDerivative, "inf|f'| <= 0");
  // monotone image is spanned by the endpoint values
  double v0 = f(0.0), v1 = f(1.0);
  double lo = std::min(v0, v1), hi = std::max(v0, v1);
  if (lo < -1e-15 || hi > 1.0 + 1e-15) fail(Errc::NotSelfMap, "f([0,1]) leaves [0,1]");
}

ConformalMap build_map(const std::string& kind, const std::vector<double>& params) {
  ConformalMap m;
  if (kind == "affine") {
    if (params.size() != 2) fail(Errc::ValidationError, "affine expects [slope, offset]");
    m = make_affine(params[0], params[1]);
  } else if (kind == "moebius") {
    if (params.size() != 1) fail(Errc::ValidationError, "moebius expects [a]");
    if (params[0] <= 1.0) fail(Errc::NotAContraction, "moebius requires a > 1");
    m = make_moebius(params[0]);
  } else if (kind == "quadratic") {
    if (params.size() != 3) fail(Errc::ValidationError, "quadratic expects [a, b, c]");
    m = make_quadratic(params[0], params[1], params[2]);
  } else {
    fail(Errc::ValidationError, "unknown map kind '" + kind + "'");
  }
  validate_map_invariants(m);
  return m;
}

}  // namespace decaylab
