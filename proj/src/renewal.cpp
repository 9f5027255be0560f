#include "decaylab/renewal.hpp"

#include <algorithm>
#include <cmath>

namespace decaylab {

namespace {

int default_coding_depth(const SelfConformalMeasure& nu) {
  return static_cast<int>(std::ceil(std::log(1e-9) / std::log(nu.ifs.rho))) + 2;
}

// walk engine shared by the samplers: generates symbols, the backward pass
// of coding points, and the running cocycle sums
struct Walk {
  const SelfConformalMeasure& nu;
  std::vector<int> symbols;
  std::vector<double> coding;  // coding[j] ~ x_{sigma^j w}, j = 0..m

  Walk(const SelfConformalMeasure& nu_, int m, int coding_depth, Rng& rng) : nu(nu_) {
    int total = m + coding_depth;
    symbols.resize(static_cast<size_t>(total));
    auto cdf = running_cdf(nu.p);
    for (auto& s : symbols) s = rng.pick(cdf);
    coding.assign(static_cast<size_t>(m) + 1, nu.ifs.x0);
    // backward pass: x_{sigma^j w} = f_{w_{j+1}}(x_{sigma^{j+1} w}); entries
    // j <= m carry at least coding_depth tail symbols of truncation
    double x = nu.ifs.x0;
    for (int j = total - 1; j >= 0; --j) {
      x = nu.ifs.maps[static_cast<size_t>(symbols[static_cast<size_t>(j)])](x);
      if (j <= m) coding[static_cast<size_t>(j)] = x;
    }
  }

  double increment(int j) const {  // X_{j+1} = -log|f'_{w_{j+1}}(x_{sigma^{j+1} w})|
    const auto& f = nu.ifs.maps[static_cast<size_t>(symbols[static_cast<size_t>(j)])];
    return -std::log(std::abs(f.deriv(coding[static_cast<size_t>(j) + 1])));
  }
};

}  // namespace

WalkSample walk_sample(const SelfConformalMeasure& nu, double k, uint64_t seed,
                       const WalkOptions& opts) {
  if (k <= 0.0) fail(Errc::ValidationError, "k must be positive");
  Rng rng(seed, 5);
  int coding_depth = opts.coding_depth > 0 ? opts.coding_depth : default_coding_depth(nu);
  int m_max = static_cast<int>(std::ceil(k / nu.ifs.D)) + 4 + opts.tail_symbols;
  Walk walk(nu, m_max, coding_depth, rng);

  WalkSample sample;
  sample.k_level = k;
  double s = 0.0;
  int tau = -1;
  for (int j = 0; j < m_max; ++j) {
    s += walk.increment(j);
    sample.path.push_back(s);
    if (s >= k) {
      tau = j + 1;
      break;
    }
  }
  if (tau < 0) fail(Errc::ValidationError, "walk failed to reach the level (internal)");
  sample.tau = tau;
  sample.s_tau = sample.path.back();

  // beta_k from the fixed-base-point derivative: T_m = -log|f'_{w|m}(x0)|
  double threshold = k + opts.eps * k / 8.0;
  int beta = 0;
  for (int m = 1; m <= static_cast<int>(walk.symbols.size()); ++m) {
    double y = nu.ifs.x0, dy = 1.0;
    for (int j = m - 1; j >= 0; --j) {
      ConformalMap::Eval e =
          nu.ifs.maps[static_cast<size_t>(walk.symbols[static_cast<size_t>(j)])].eval(y);
      dy *= e.d1;
      y = e.value;
    }
    if (-std::log(std::abs(dy)) > threshold) {
      beta = m;
      break;
    }
  }
  sample.beta = beta;
  sample.prefix.assign(walk.symbols.begin(),
                       walk.symbols.begin() + std::min<size_t>(walk.symbols.size(),
                                                               static_cast<size_t>(tau) +
                                                                   opts.tail_symbols));
  sample.tail.assign(walk.symbols.begin() + tau,
                     walk.symbols.begin() + tau + opts.tail_symbols);
  return sample;
}

RenewalValue renewal_apply(const SelfConformalMeasure& nu,
                           const std::function<double(double, double)>& f, double x_lo,
                           double x_hi, double z, double t, long long enumeration_cap,
                           long long mc_trajectories, uint64_t seed) {
  if (x_hi < x_lo) fail(Errc::ValidationError, "empty support window");
  // the cocycle grows by at least D per generation, so the sum over words is
  // reversal-invariant and terminates once c(w, z) - t > x_hi
  double budget = t + x_hi;
  double n_max = budget > 0.0 ? budget / nu.ifs.D + 2.0 : 2.0;
  double words = std::pow(static_cast<double>(nu.alphabet()), n_max);

  RenewalValue out;
  if (words <= static_cast<double>(enumeration_cap)) {
    long long terms = 0;
    double acc = 0.0;
    // extend words at the outer end: y -> f_a(y), c -> c + c(a, y)
    auto dfs = [&](auto&& self, double y, double c, double weight) -> void {
      double arg = c - t;
      if (arg >= x_lo && arg <= x_hi) {
        acc += weight * f(y, arg);
        ++terms;
      }
      if (c > budget) return;  // increments are positive; subtree pruned
      for (int a = 0; a < nu.alphabet(); ++a) {
        const auto& map = nu.ifs.maps[static_cast<size_t>(a)];
        double ca = -std::log(std::abs(map.deriv(y)));
        self(self, map(y), c + ca, weight * nu.p[static_cast<size_t>(a)]);
      }
    };
    dfs(dfs, z, 0.0, 1.0);
    out.value = acc;
    out.terms = terms;
    out.exact = true;
    return out;
  }

  // Monte Carlo over trajectories: each contributes its whole prefix sum
  Rng rng(seed, 6);
  auto cdf = running_cdf(nu.p);
  double s1 = 0.0, s2 = 0.0;
  for (long long i = 0; i < mc_trajectories; ++i) {
    double y = z, c = 0.0, contrib = 0.0;
    while (c <= budget) {
      double arg = c - t;
      if (arg >= x_lo && arg <= x_hi) contrib += f(y, arg);
      int a = rng.pick(cdf);
      const auto& map = nu.ifs.maps[static_cast<size_t>(a)];
      c += -std::log(std::abs(map.deriv(y)));
      y = map(y);
    }
    s1 += contrib;
    s2 += contrib * contrib;
  }
  double n = static_cast<double>(mc_trajectories);
  out.value = s1 / n;
  out.stderr_value = std::sqrt(std::max(0.0, s2 / n - out.value * out.value) / n);
  out.terms = mc_trajectories;
  out.exact = false;
  return out;
}

RenewalLimit renewal_limit(const SelfConformalMeasure& nu,
                           const std::function<double(double, double)>& f, double x_lo,
                           double x_hi, double t, long long n_mc, uint64_t seed) {
  auto chi = lyapunov(nu, n_mc, default_coding_depth(nu), seed + 17);
  double lo = std::max(x_lo, -t);
  RenewalLimit out;
  out.chi = chi.chi;
  if (lo >= x_hi) return out;

  // Simpson in u, Monte Carlo in y
  const int panels = 128;
  auto pts = sample_points(nu, n_mc, default_coding_depth(nu), seed + 31);
  double s1 = 0.0, s2 = 0.0;
  for (double y : pts) {
    double integral = 0.0;
    double h = (x_hi - lo) / (2 * panels);
    for (int i = 0; i <= 2 * panels; ++i) {
      double u = lo + h * i;
      double w = (i == 0 || i == 2 * panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      integral += w * f(y, u);
    }
    integral *= h / 3.0;
    s1 += integral;
    s2 += integral * integral;
  }
  double n = static_cast<double>(pts.size());
  double mean = s1 / n;
  double se = std::sqrt(std::max(0.0, s2 / n - mean * mean) / n);
  out.value = mean / chi.chi;
  out.stderr_value = std::hypot(se / chi.chi, mean * chi.stderr_value / (chi.chi * chi.chi));
  return out;
}

std::vector<double> increment_samples(const SelfConformalMeasure& nu, long long n, int depth,
                                      uint64_t seed) {
  Rng rng(seed, 7);
  auto cdf = running_cdf(nu.p);
  auto pts = sample_points(nu, n, depth, seed + 3);
  std::vector<double> xs(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    int a = rng.pick(cdf);
    xs[static_cast<size_t>(i)] =
        -std::log(std::abs(nu.ifs.maps[static_cast<size_t>(a)].deriv(pts[static_cast<size_t>(i)])));
  }
  return xs;
}

LatticeInfo detect_lattice(const std::vector<double>& increments, double tol) {
  LatticeInfo info;
  if (increments.empty()) return info;
  // collect distinct values; a continuous law explodes the count immediately
  std::vector<double> distinct;
  std::vector<double> sorted = increments;
  std::sort(sorted.begin(), sorted.end());
  for (double v : sorted) {
    if (distinct.empty() || v - distinct.back() > tol) distinct.push_back(v);
    if (distinct.size() > 64) return info;
  }
  if (distinct.size() == 1) {
    info.lattice = true;
    info.span = distinct[0];
    info.base = distinct[0];
    return info;
  }
  // candidate span: smallest positive difference; all values must sit on
  // base + span Z
  double span = 2.0;
  for (size_t i = 0; i + 1 < distinct.size(); ++i)
    span = std::min(span, distinct[i + 1] - distinct[i]);
  for (double v : distinct) {
    double steps = (v - distinct[0]) / span;
    if (std::abs(steps - std::round(steps)) > 1e-6) return info;
  }
  info.lattice = true;
  info.span = span;
  info.base = distinct[0];
  return info;
}

namespace {

double integral_of(const std::function<double(double)>& g, double hi) {
  const int panels = 64;
  double h = hi / (2 * panels);
  double acc = 0.0;
  for (int i = 0; i <= 2 * panels; ++i) {
    double w = (i == 0 || i == 2 * panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * g(h * i);
  }
  return acc * h / 3.0;
}

}  // namespace

ResidueReport residue_cutoff(const SelfConformalMeasure& nu,
                             const std::function<double(double)>& g, double k, long long n_mc,
                             uint64_t seed, const WalkOptions& opts) {
  if (k <= nu.ifs.Dprime + 1.0)
    fail(Errc::ValidationError, "k must exceed D' + 1 for the conditional form");

  struct Acc {
    long long count = 0;
    double s1 = 0.0, s2 = 0.0;
  };
  std::map<std::vector<int>, Acc> bins;
  double u1 = 0.0, u2 = 0.0;
  for (long long i = 0; i < n_mc; ++i) {
    WalkSample ws = walk_sample(nu, k, seed + static_cast<uint64_t>(i) * 2654435761ULL, opts);
    double v = g(ws.s_tau - k);
    auto& acc = bins[ws.tail];
    acc.count += 1;
    acc.s1 += v;
    acc.s2 += v * v;
    u1 += v;
    u2 += v * v;
  }

  ResidueReport rep;
  rep.e_c_one = 1.0;  // the walk crosses the level exactly once per trajectory
  double n = static_cast<double>(n_mc);
  rep.unconditional = u1 / n;
  rep.unconditional_stderr =
      std::sqrt(std::max(0.0, u2 / n - rep.unconditional * rep.unconditional) / n);
  for (auto& [tail, acc] : bins) {
    ResidueBin bin;
    bin.tail = tail;
    bin.count = acc.count;
    bin.estimate = acc.s1 / acc.count;
    bin.stderr_value = std::sqrt(
        std::max(0.0, acc.s2 / acc.count - bin.estimate * bin.estimate) / acc.count);
    rep.bins.push_back(std::move(bin));
  }

  // limit (1/chi) E_kappa[int_0^Y g] with kappa-consistent chi
  auto incs = increment_samples(nu, std::max<long long>(n_mc, 10000),
                                default_coding_depth(nu), seed + 91);
  double l1 = 0.0, l2 = 0.0, c1 = 0.0;
  for (double y : incs) {
    double gy = integral_of(g, y);
    l1 += gy;
    l2 += gy * gy;
    c1 += y;
  }
  double m = static_cast<double>(incs.size());
  rep.chi_hat = c1 / m;
  double mean = l1 / m;
  rep.limit = mean / rep.chi_hat;
  rep.limit_stderr = std::sqrt(std::max(0.0, l2 / m - mean * mean) / m) / rep.chi_hat;
  return rep;
}

EquidistributionReport equidistribution_test(const SelfConformalMeasure& nu,
                                             const std::function<double(double)>& g,
                                             const std::vector<double>& k_list, long long n_mc,
                                             uint64_t seed, const WalkOptions& opts) {
  auto incs = increment_samples(nu, 4000, default_coding_depth(nu), seed + 7);
  auto lattice = detect_lattice(incs);
  if (lattice.lattice)
    fail(Errc::LatticeDetected, "increment law concentrates on a lattice of span " +
                                    std::to_string(lattice.span));

  EquidistributionReport rep;
  for (double k : k_list) {
    auto res = residue_cutoff(nu, g, k, n_mc, seed + static_cast<uint64_t>(k * 1000), opts);
    EquidistributionPoint pt;
    pt.k = k;
    pt.limit = res.limit;
    double dev2 = 0.0, noise2 = 0.0;
    long long total = 0;
    for (const auto& bin : res.bins) total += bin.count;
    for (const auto& bin : res.bins) {
      double w = static_cast<double>(bin.count) / total;
      double d = bin.estimate - res.limit;
      dev2 += w * d * d;
      noise2 += w * (bin.stderr_value * bin.stderr_value + res.limit_stderr * res.limit_stderr);
    }
    pt.error = std::sqrt(dev2);
    pt.noise_floor = std::sqrt(noise2);
    rep.points.push_back(pt);
  }

  // exponential rate over points clear of the noise floor
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& pt : rep.points) {
    if (pt.error <= 2.0 * pt.noise_floor) continue;
    double x = pt.k, y = std::log(pt.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    double denom = cnt * sxx - sx * sx;
    double slope = (cnt * sxy - sx * sy) / denom;
    rep.rate = -slope;
    rep.rate_valid = true;
    double res2 = 0.0;
    double intercept = (sy - slope * sx) / cnt;
    for (const auto& pt : rep.points) {
      if (pt.error <= 2.0 * pt.noise_floor) continue;
      double e = std::log(pt.error) - slope * pt.k - intercept;
      res2 += e * e;
    }
    rep.rate_stderr = cnt > 2 ? std::sqrt(res2 / (cnt - 2) / (sxx - sx * sx / cnt)) : 0.0;
  }
  return rep;
}

double Mollifier::normalization() {
  // int_{-1}^{1} exp(-1/(1-x^2)) dx by Simpson; the integrand is flat at
  // the endpoints so the rule converges fast
  static double cached = [] {
    const int panels = 4096;
    double h = 2.0 / (2 * panels);
    double acc = 0.0;
    for (int i = 0; i <= 2 * panels; ++i) {
      double x = -1.0 + h * i;
      double v = std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
      double w = (i == 0 || i == 2 * panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * v;
    }
    return 1.0 / (acc * h / 3.0);
  }();
  return cached;
}

double Mollifier::operator()(double x) const {
  double scaled = x / (delta * delta);
  if (std::abs(scaled) >= 1.0) return 0.0;
  return c0 / (delta * delta) * std::exp(-1.0 / (1.0 - scaled * scaled));
}

double GridFunction::integral() const {
  if (values.size() < 2) return 0.0;
  double acc = 0.5 * (values.front() + values.back());
  for (size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
  return acc * h;
}

GridFunction mollify(const GridFunction& f, double delta) {
  if (delta <= 0.0 || delta >= 1.0) fail(Errc::ValidationError, "delta must lie in (0,1)");
  Mollifier psi{delta, Mollifier::normalization()};
  // discrete kernel on the grid spacing, normalized so the total integral
  // is preserved to rounding
  long long half = std::max<long long>(1, static_cast<long long>(std::ceil(delta * delta / f.h)));
  std::vector<double> kernel(static_cast<size_t>(2 * half + 1));
  double mass = 0.0;
  for (long long j = -half; j <= half; ++j) {
    double w = psi(static_cast<double>(j) * f.h);
    kernel[static_cast<size_t>(j + half)] = w;
    mass += w;
  }
  for (double& w : kernel) w /= mass * f.h;

  GridFunction out;
  out.x0 = f.x0;
  out.h = f.h;
  out.values.assign(f.values.size(), 0.0);
  for (size_t i = 0; i < f.values.size(); ++i) {
    double acc = 0.0;
    for (long long j = -half; j <= half; ++j) {
      long long src = static_cast<long long>(i) - j;
      if (src < 0 || src >= static_cast<long long>(f.values.size())) continue;
      acc += kernel[static_cast<size_t>(j + half)] * f.values[static_cast<size_t>(src)];
    }
    out.values[i] = acc * f.h;
  }
  return out;
}

}  // namespace decaylab
