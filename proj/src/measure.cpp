#include "decaylab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "decaylab/parallel.hpp"

namespace decaylab {

SelfConformalMeasure make_measure(Ifs ifs, std::vector<double> p) {
  if (static_cast<int>(p.size()) != ifs.alphabet())
    fail(Errc::ValidationError, "probability vector length must match the alphabet");
  double sum = 0.0;
  for (double v : p) {
    if (v <= 0.0) fail(Errc::ValidationError, "p must be strictly positive");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-15 * p.size())
    fail(Errc::ValidationError, "p must sum to 1");
  return {std::move(ifs), std::move(p)};
}

std::vector<double> sample_points(const SelfConformalMeasure& nu, long long count, int depth,
                                  uint64_t seed) {
  if (depth < 1 || count < 1) fail(Errc::ValidationError, "depth and count must be >= 1");
  Rng rng(seed, 0);
  auto cdf = running_cdf(nu.p);
  std::vector<double> pts(static_cast<size_t>(count));
  std::vector<int> word(static_cast<size_t>(depth));
  for (long long i = 0; i < count; ++i) {
    for (int j = 0; j < depth; ++j) word[static_cast<size_t>(j)] = rng.pick(cdf);
    // apply innermost symbol first
    double y = nu.ifs.x0;
    for (int j = depth - 1; j >= 0; --j) y = nu.ifs.maps[static_cast<size_t>(word[static_cast<size_t>(j)])](y);
    pts[static_cast<size_t>(i)] = y;
  }
  return pts;
}

namespace {

// depth-first sum of weight_w * term(f_w(x0)) over all words of length m;
// words are extended at the inner end, which shares evaluation prefixes
template <typename Term>
void cylinder_sum(const SelfConformalMeasure& nu, int m, Term&& term) {
  const int n = nu.alphabet();
  struct Frame {
    double point;
    double weight;
  };
  std::function<void(int, double, double)> dfs = [&](int depth, double point, double weight) {
    if (depth == m) {
      term(point, weight);
      return;
    }
    for (int s = 0; s < n; ++s)
      dfs(depth + 1, nu.ifs.maps[static_cast<size_t>(s)](point), weight * nu.p[static_cast<size_t>(s)]);
  };
  dfs(0, nu.ifs.x0, 1.0);
}

int cylinder_depth_for(const SelfConformalMeasure& nu, double q, double tol) {
  if (q == 0.0) return 0;
  double m = std::log(2.0 * M_PI * std::abs(q) / tol) / std::log(1.0 / nu.ifs.rho);
  return std::max(0, static_cast<int>(std::ceil(m)));
}

}  // namespace

FourierEstimate fourier_cylinder(const SelfConformalMeasure& nu, double q, double tol,
                                 long long leaf_cap) {
  if (tol <= 0.0) fail(Errc::ValidationError, "tol must be positive");
  FourierEstimate est;
  est.q = q;
  est.method = "cylinder";
  if (q == 0.0) {
    est.value = 1.0;
    est.error_bound = 0.0;
    return est;
  }
  int m = cylinder_depth_for(nu, q, tol);
  double leaves = std::pow(static_cast<double>(nu.alphabet()), m);
  if (leaves > static_cast<double>(leaf_cap))
    fail(Errc::CostCapExceeded, "cylinder enumeration needs " + std::to_string(leaves) +
                                    " leaves; use the Monte Carlo estimator");
  std::complex<double> acc = 0.0;
  const double w = 2.0 * M_PI * q;
  cylinder_sum(nu, m, [&](double point, double weight) {
    acc += weight * std::complex<double>(std::cos(w * point), std::sin(w * point));
  });
  est.value = acc;
  est.error_bound = 2.0 * M_PI * std::abs(q) * std::pow(nu.ifs.rho, m);
  est.depth = m;
  return est;
}

FourierEstimate fourier_mc(const SelfConformalMeasure& nu, double q, long long n_samples,
                           int depth, uint64_t seed) {
  if (n_samples < 100) fail(Errc::ValidationError, "n_samples must be >= 100");
  FourierEstimate est;
  est.q = q;
  est.method = "mc";
  est.depth = depth;
  if (q == 0.0) {
    est.value = 1.0;
    return est;
  }
  Rng rng(seed, 1);
  auto cdf = running_cdf(nu.p);
  const double w = 2.0 * M_PI * q;
  double sr = 0.0, si = 0.0, srr = 0.0, sii = 0.0;
  std::vector<int> word(static_cast<size_t>(depth));
  for (long long i = 0; i < n_samples; ++i) {
    for (int j = 0; j < depth; ++j) word[static_cast<size_t>(j)] = rng.pick(cdf);
    double y = nu.ifs.x0;
    for (int j = depth - 1; j >= 0; --j) y = nu.ifs.maps[static_cast<size_t>(word[static_cast<size_t>(j)])](y);
    double re = std::cos(w * y), im = std::sin(w * y);
    sr += re;
    si += im;
    srr += re * re;
    sii += im * im;
  }
  double n = static_cast<double>(n_samples);
  double mr = sr / n, mi = si / n;
  est.value = {mr, mi};
  est.stderr_re = std::sqrt(std::max(0.0, srr / n - mr * mr) / n);
  est.stderr_im = std::sqrt(std::max(0.0, sii / n - mi * mi) / n);
  return est;
}

DecayReportMeasure decay_exponent(const SelfConformalMeasure& nu, double q_min, double q_max,
                                  int blocks, int samples_per_block, double tol,
                                  long long leaf_cap) {
  if (q_min < 1.0) fail(Errc::ValidationError, "q_min must be >= 1");
  if (blocks < 4) fail(Errc::ValidationError, "need at least 4 blocks");
  if (q_max / q_min < std::pow(2.0, blocks))
    fail(Errc::ValidationError, "q_max/q_min must be >= 2^blocks");

  DecayReportMeasure report;
  report.tol = tol;
  const double ratio = std::pow(q_max / q_min, 1.0 / blocks);
  for (int b = 0; b < blocks; ++b) {
    DecayBlock blk;
    blk.q_lo = q_min * std::pow(ratio, b);
    blk.q_hi = q_min * std::pow(ratio, b + 1);
    std::set<double> qs;
    for (int i = 0; i < samples_per_block; ++i) {
      double t = static_cast<double>(i) / (samples_per_block - 1);
      double q = blk.q_lo * std::pow(blk.q_hi / blk.q_lo, t);
      qs.insert(q);
      // lattice obstructions live on integer frequencies
      double qi = std::round(q);
      if (qi >= blk.q_lo && qi <= blk.q_hi && qi >= 1.0) qs.insert(qi);
    }
    std::vector<double> q_list(qs.begin(), qs.end());
    std::vector<double> moduli(q_list.size());
    parallel_for(static_cast<long long>(q_list.size()), [&](long long i) {
      moduli[static_cast<size_t>(i)] =
          std::abs(fourier_cylinder(nu, q_list[static_cast<size_t>(i)], tol, leaf_cap).value);
    });
    for (size_t i = 0; i < q_list.size(); ++i) {
      if (moduli[i] > blk.sup_modulus) {
        blk.sup_modulus = moduli[i];
        blk.q_at_sup = q_list[i];
      }
    }
    report.blocks.push_back(blk);
  }

  // least-squares line of log sup against log geometric block midpoint
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double floor_val = 1e-15;
  int m = blocks;
  for (const auto& blk : report.blocks) {
    double x = std::log(std::sqrt(blk.q_lo * blk.q_hi));
    double y = std::log(std::max(blk.sup_modulus, floor_val));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  report.alpha_hat = -slope;
  double intercept = (sy - slope * sx) / m;
  double res = 0.0;
  for (const auto& blk : report.blocks) {
    double x = std::log(std::sqrt(blk.q_lo * blk.q_hi));
    double y = std::log(std::max(blk.sup_modulus, floor_val));
    res += (y - slope * x - intercept) * (y - slope * x - intercept);
  }
  report.fit_residual = std::sqrt(res / m);
  return report;
}

FrostmanReport frostman_exponent(const SelfConformalMeasure& nu, std::vector<double> r_grid,
                                 long long n_samples, uint64_t seed, int depth) {
  for (size_t i = 0; i + 1 < r_grid.size(); ++i)
    if (r_grid[i] <= r_grid[i + 1]) fail(Errc::ValidationError, "r_grid must be decreasing");
  for (double r : r_grid)
    if (r <= 0.0 || r >= 1.0) fail(Errc::ValidationError, "r values must lie in (0,1)");

  auto pts = sample_points(nu, n_samples, depth, seed);
  std::sort(pts.begin(), pts.end());
  FrostmanReport rep;
  rep.r = r_grid;
  const double n = static_cast<double>(pts.size());
  for (double r : r_grid) {
    // largest sample count in any window of width 2r
    size_t lo = 0;
    size_t best = 0;
    for (size_t hi = 0; hi < pts.size(); ++hi) {
      while (pts[hi] - pts[lo] > 2.0 * r) ++lo;
      best = std::max(best, hi - lo + 1);
    }
    rep.sup_mass.push_back(static_cast<double>(best) / n);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(r_grid.size());
  for (int i = 0; i < m; ++i) {
    double x = std::log(r_grid[static_cast<size_t>(i)]);
    double y = std::log(rep.sup_mass[static_cast<size_t>(i)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.d_hat = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return rep;
}

LyapunovEstimate lyapunov(const SelfConformalMeasure& nu, long long n_samples, int depth,
                          uint64_t seed) {
  Rng rng(seed, 2);
  auto cdf = running_cdf(nu.p);
  double s = 0.0, ss = 0.0;
  std::vector<int> word(static_cast<size_t>(depth));
  for (long long i = 0; i < n_samples; ++i) {
    for (int j = 0; j < depth; ++j) word[static_cast<size_t>(j)] = rng.pick(cdf);
    double y = nu.ifs.x0;
    for (int j = depth - 1; j >= 0; --j) y = nu.ifs.maps[static_cast<size_t>(word[static_cast<size_t>(j)])](y);
    int a = rng.pick(cdf);
    double v = -std::log(std::abs(nu.ifs.maps[static_cast<size_t>(a)].deriv(y)));
    s += v;
    ss += v * v;
  }
  double n = static_cast<double>(n_samples);
  double mean = s / n;
  return {mean, std::sqrt(std::max(0.0, ss / n - mean * mean) / n)};
}

double integrate_cylinder(const SelfConformalMeasure& nu, const std::function<double(double)>& h,
                          int depth, long long leaf_cap) {
  double leaves = std::pow(static_cast<double>(nu.alphabet()), depth);
  if (leaves > static_cast<double>(leaf_cap))
    fail(Errc::CostCapExceeded, "cylinder integration exceeds the leaf cap");
  double acc = 0.0;
  cylinder_sum(nu, depth, [&](double point, double weight) { acc += weight * h(point); });
  return acc;
}

double lyapunov_cylinder(const SelfConformalMeasure& nu, int depth, long long leaf_cap) {
  return integrate_cylinder(
      nu,
      [&](double x) {
        double acc = 0.0;
        for (int a = 0; a < nu.alphabet(); ++a)
          acc += nu.p[static_cast<size_t>(a)] *
                 -std::log(std::abs(nu.ifs.maps[static_cast<size_t>(a)].deriv(x)));
        return acc;
      },
      depth, leaf_cap);
}

}  // namespace decaylab
