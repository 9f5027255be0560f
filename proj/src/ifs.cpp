#include "decaylab/ifs.hpp"

#include <algorithm>
#include <cmath>

#include "decaylab/rng.hpp"

namespace decaylab {

bool Ifs::orientation_preserving() const {
  for (const auto& m : maps)
    if (!m.orientation_preserving()) return false;
  return true;
}

bool Ifs::all_orientation_reversing() const {
  for (const auto& m : maps)
    if (m.orientation_preserving()) return false;
  return true;
}

namespace {

double fixed_point(const ConformalMap& f) {
  // iterate from the midpoint; uniform contraction gives geometric convergence
  double x = 0.5;
  for (int i = 0; i < 400; ++i) {
    double nx = f(x);
    if (std::abs(nx - x) < 1e-16) return nx;
    x = nx;
  }
  return x;
}

Interval map_interval(const ConformalMap& f, const Interval& j) {
  double a = f(j.lo), b = f(j.hi);
  return {std::min(a, b), std::max(a, b)};
}

Interval attractor_hull(const std::vector<ConformalMap>& maps) {
  Interval j{0.0, 1.0};
  for (int it = 0; it < 4000; ++it) {
    Interval next{1.0, 0.0};
    for (const auto& f : maps) {
      Interval im = map_interval(f, j);
      next.lo = std::min(next.lo, im.lo);
      next.hi = std::max(next.hi, im.hi);
    }
    if (std::abs(next.lo - j.lo) < 1e-15 && std::abs(next.hi - j.hi) < 1e-15) return next;
    j = next;
  }
  return j;
}

double sup_log_deriv_slope(const ConformalMap& f, int grid) {
  double best = 0.0;
  for (int i = 0; i <= grid; ++i) {
    double x = static_cast<double>(i) / grid;
    best = std::max(best, std::abs(f.log_deriv_slope(x)));
  }
  return best;
}

}  // namespace

Ifs validate_ifs(std::vector<ConformalMap> maps, const IfsOptions& opts) {
  if (maps.size() < 2) fail(Errc::ValidationError, "an IFS needs at least two maps");
  for (const auto& m : maps) validate_map_invariants(m);

  bool distinct = false;
  double fp0 = fixed_point(maps[0]);
  for (size_t i = 1; i < maps.size() && !distinct; ++i)
    if (std::abs(fixed_point(maps[i]) - fp0) > 1e-12) distinct = true;
  if (!distinct) fail(Errc::SharedFixedPoint, "all fixed points coincide; attractor is a point");

  Ifs ifs;
  ifs.maps = std::move(maps);
  ifs.rho = 0.0;
  ifs.rho_min = 1.0;
  for (const auto& m : ifs.maps) {
    DerivBounds b = derivative_bounds(m, opts.grid, opts.rtol);
    ifs.rho = std::max(ifs.rho, b.sup_abs);
    ifs.rho_min = std::min(ifs.rho_min, b.inf_abs);
    ifs.log_deriv_slope_sup = std::max(ifs.log_deriv_slope_sup, sup_log_deriv_slope(m, opts.grid));
  }
  ifs.D = -std::log(ifs.rho);
  ifs.Dprime = -std::log(ifs.rho_min);
  ifs.hull = attractor_hull(ifs.maps);
  ifs.x0 = 0.5 * (ifs.hull.lo + ifs.hull.hi);

  if (opts.require_endpoint_margin && ifs.endpoint_margin() <= 0.0)
    fail(Errc::EndpointInAttractor, "attractor hull touches {0,1}");
  return ifs;
}

ConformalMap compose_word(const Ifs& ifs, const Word& w) {
  if (w.empty()) fail(Errc::ValidationError, "compose_word needs a non-empty word");
  std::vector<ConformalMap> factors;
  factors.reserve(w.size());
  for (int s : w) {
    if (s < 0 || s >= ifs.alphabet()) fail(Errc::ValidationError, "word symbol out of range");
    factors.push_back(ifs.maps[static_cast<size_t>(s)]);
  }
  return compose(std::move(factors));
}

Interval cylinder_interval(const Ifs& ifs, const Word& w) {
  // evaluate both endpoints through the composition without materializing it
  double a = 0.0, b = 1.0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    const auto& f = ifs.maps[static_cast<size_t>(*it)];
    a = f(a);
    b = f(b);
  }
  return {std::min(a, b), std::max(a, b)};
}

DistortionReport distortion_constant(const Ifs& ifs, int max_depth, int grid, long long word_cap,
                                     uint64_t seed) {
  if (max_depth < 1) fail(Errc::ValidationError, "max_depth must be >= 1");
  const int n = ifs.alphabet();

  double worst = 1.0;
  auto ratio_of = [&](const Word& w) {
    ConformalMap f = compose_word(ifs, w);
    double lo = std::abs(f.deriv(0.0)), hi = lo;
    for (int i = 1; i <= grid; ++i) {
      double v = std::abs(f.deriv(static_cast<double>(i) / grid));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi / lo;
  };

  long long total = 0, layer = 1;
  int exhaustive_depth = 0;
  for (int d = 1; d <= max_depth; ++d) {
    layer *= n;
    if (total + layer > word_cap) break;
    total += layer;
    exhaustive_depth = d;
  }

  Word w;
  // depth-first enumeration of all words up to exhaustive_depth
  auto dfs = [&](auto&& self, int depth) -> void {
    if (depth > 0) worst = std::max(worst, ratio_of(w));
    if (depth == exhaustive_depth) return;
    for (int s = 0; s < n; ++s) {
      w.push_back(s);
      self(self, depth + 1);
      w.pop_back();
    }
  };
  dfs(dfs, 0);

  if (exhaustive_depth < max_depth) {
    Rng rng(seed, 0);
    int samples = static_cast<int>(std::min<long long>(word_cap, 2000));
    for (int i = 0; i < samples; ++i) {
      int d = exhaustive_depth + 1 +
              static_cast<int>(rng.below(static_cast<uint64_t>(max_depth - exhaustive_depth)));
      Word rw(static_cast<size_t>(d));
      for (auto& s : rw) s = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
      worst = std::max(worst, ratio_of(rw));
    }
  }
  return {worst, ifs.distortion_bound()};
}

InducedIfs induce(const Ifs& ifs, int generation, long long alphabet_cap) {
  if (generation < 1) fail(Errc::ValidationError, "generation must be >= 1");
  const int n = ifs.alphabet();
  double count = std::pow(static_cast<double>(n), generation);
  if (count > static_cast<double>(alphabet_cap))
    fail(Errc::AlphabetTooLarge, "n^N = " + std::to_string(count) + " exceeds cap " +
                                     std::to_string(alphabet_cap));

  InducedIfs out;
  out.generation = generation;
  Word w;
  std::vector<ConformalMap> maps;
  auto dfs = [&](auto&& self, int depth) -> void {
    if (depth == generation) {
      out.labels.push_back(w);
      maps.push_back(compose_word(ifs, w));
      return;
    }
    for (int s = 0; s < n; ++s) {
      w.push_back(s);
      self(self, depth + 1);
      w.pop_back();
    }
  };
  dfs(dfs, 0);
  out.ifs = validate_ifs(std::move(maps));
  return out;
}

}  // namespace decaylab
