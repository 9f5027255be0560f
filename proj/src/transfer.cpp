#include "decaylab/transfer.hpp"

#include <cmath>

#include "decaylab/parallel.hpp"

namespace decaylab {

namespace {

std::complex<double> weight(std::complex<double> s, double cocycle) {
  return std::exp(2.0 * M_PI * s * cocycle);
}

void check_strip(std::complex<double> s, double strip_eps) {
  if (std::abs(s.real()) > strip_eps)
    fail(Errc::StripExceeded, "|Re s| = " + std::to_string(std::abs(s.real())) +
                                  " exceeds the strip half-width " + std::to_string(strip_eps));
}

}  // namespace

DiscreteOperator discretize(const SelfConformalMeasure& nu, std::complex<double> s, int m,
                            double strip_eps) {
  if (m < 16) fail(Errc::ValidationError, "grid size must be >= 16");
  check_strip(s, strip_eps);
  DiscreteOperator op{s, ChebGrid(m), Eigen::MatrixXcd::Zero(m, m), "global"};
  for (int j = 0; j < m; ++j) {
    double x = op.grid.node(j);
    for (int a = 0; a < nu.alphabet(); ++a) {
      const auto& f = nu.ifs.maps[static_cast<size_t>(a)];
      double cocycle = -std::log(std::abs(f.deriv(x)));
      std::complex<double> w = nu.p[static_cast<size_t>(a)] * weight(s, cocycle);
      auto iw = op.grid.interp_weights(f(x));
      for (int k = 0; k < m; ++k) op.matrix(j, k) += w * iw[static_cast<size_t>(k)];
    }
  }
  return op;
}

DiscreteOperator discretize_nstep(const SelfConformalMeasure& nu, std::complex<double> s, int m,
                                  int steps, double strip_eps) {
  if (m < 16) fail(Errc::ValidationError, "grid size must be >= 16");
  check_strip(s, strip_eps);
  DiscreteOperator op{s, ChebGrid(m), Eigen::MatrixXcd::Zero(m, m), "global"};
  const int n = nu.alphabet();
  Word w(static_cast<size_t>(steps));
  for (int j = 0; j < m; ++j) {
    double x = op.grid.node(j);
    auto dfs = [&](auto&& self, int depth, double weight_prod) -> void {
      if (depth == steps) {
        // c(w, x) and f_w(x) through one composed evaluation
        double y = x, dy = 1.0;
        for (auto it = w.rbegin(); it != w.rend(); ++it) {
          ConformalMap::Eval e = nu.ifs.maps[static_cast<size_t>(*it)].eval(y);
          dy *= e.d1;
          y = e.value;
        }
        std::complex<double> cw = weight_prod * weight(s, -std::log(std::abs(dy)));
        auto iw = op.grid.interp_weights(y);
        for (int k = 0; k < m; ++k) op.matrix(j, k) += cw * iw[static_cast<size_t>(k)];
        return;
      }
      for (int a = 0; a < n; ++a) {
        w[static_cast<size_t>(depth)] = a;
        self(self, depth + 1, weight_prod * nu.p[static_cast<size_t>(a)]);
      }
    };
    dfs(dfs, 0, 1.0);
  }
  return op;
}

Eigen::VectorXcd apply_op(const DiscreteOperator& op, const Eigen::VectorXcd& g_values) {
  if (g_values.size() != op.size()) fail(Errc::GridMismatch, "value vector does not match grid");
  return op.matrix * g_values;
}

double grid_norm(const DiscreteOperator& op, const Eigen::VectorXcd& g, NormFlavor flavor) {
  double sup = sup_abs(g);
  double dsup = sup_abs(op.grid.derivative(g));
  if (flavor == NormFlavor::C1) return sup + dsup;
  double b = std::abs(op.s.imag());
  if (b == 0.0) b = 1.0;
  return sup + dsup / b;
}

NormReport power_norm(const DiscreteOperator& op, Eigen::VectorXcd g, int n, NormFlavor flavor) {
  if (n < 1) fail(Errc::ValidationError, "need at least one iteration");
  NormReport report;
  report.flavor = flavor;
  for (int k = 1; k <= n; ++k) {
    g = op.matrix * g;
    double nk = grid_norm(op, g, flavor);
    if (!std::isfinite(nk) || nk > 1e12)
      fail(Errc::Overflow, "norm grew beyond 1e12 at step " + std::to_string(k) +
                               "; a-priori bound violated");
    report.norms.push_back(nk);
  }
  // log-linear fit over the back half of the run
  int lo = n / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int k = lo; k < n; ++k) {
    double x = k + 1.0;
    double y = std::log(std::max(report.norms[static_cast<size_t>(k)], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  double denom = cnt * sxx - sx * sx;
  double slope = denom != 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
  double intercept = (sy - slope * sx) / cnt;
  report.fitted_alpha = std::exp(slope);
  report.fitted_c = std::exp(intercept);
  double res = 0.0;
  for (int k = lo; k < n; ++k) {
    double y = std::log(std::max(report.norms[static_cast<size_t>(k)], 1e-300));
    double e = y - slope * (k + 1.0) - intercept;
    res += e * e;
  }
  report.fit_residual = std::sqrt(res / cnt);
  return report;
}

std::vector<Eigen::VectorXcd> probe_set(const DiscreteOperator& op, double b) {
  const int m = op.size();
  std::vector<Eigen::VectorXcd> probes;
  auto add = [&](const std::function<std::complex<double>(double)>& f) {
    Eigen::VectorXcd v(m);
    for (int j = 0; j < m; ++j) v(j) = f(op.grid.node(j));
    double norm = grid_norm(op, v, NormFlavor::B);
    probes.push_back(v / norm);
  };
  const std::complex<double> i2pi(0.0, 2.0 * M_PI);
  add([](double) { return 1.0; });
  add([](double x) { return 2.0 * x - 1.0; });
  add([](double x) { return x * x; });
  add([](double x) { return x * x * x - 0.5 * x; });
  add([&](double x) { return std::exp(i2pi * (b * x)); });
  add([&](double x) { return std::exp(-i2pi * (b * x)); });
  add([&](double x) { return std::exp(i2pi * (0.5 * b * x)); });
  add([&](double x) { return (2.0 * x - 1.0) * std::exp(i2pi * (b * x)); });
  return probes;
}

GapScanReport spectral_gap_scan(const SelfConformalMeasure& nu, double a,
                                const std::vector<double>& b_list, int n, int m,
                                double strip_eps) {
  for (double b : b_list)
    if (std::abs(b) < 1.0) fail(Errc::ValidationError, "|b| must be >= 1 in the scan");
  GapScanReport rep;
  rep.a = a;
  rep.iterations = n;
  rep.grid_size = m;
  rep.rows.assign(b_list.size(), GapScanRow{});
  // scan points are independent; rows land in their own slots
  parallel_for(static_cast<long long>(b_list.size()), [&](long long i) {
    double b = b_list[static_cast<size_t>(i)];
    DiscreteOperator op = discretize(nu, {a, b}, m, strip_eps);
    GapScanRow row;
    row.b = b;
    for (auto& g : probe_set(op, b)) {
      NormReport nr = power_norm(op, g, n, NormFlavor::B);
      row.alpha = std::max(row.alpha, nr.fitted_alpha);
      row.c = std::max(row.c, nr.fitted_c);
    }
    rep.rows[static_cast<size_t>(i)] = row;
  });
  // gamma from C(b) ~ |b|^(1+gamma)
  if (rep.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& row : rep.rows) {
      double x = std::log(std::abs(row.b));
      double y = std::log(std::max(row.c, 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
    double denom = cnt * sxx - sx * sx;
    if (denom != 0.0) rep.gamma_fit = (cnt * sxy - sx * sy) / denom - 1.0;
  }
  return rep;
}

ResolventProbeResult resolvent_probe(const SelfConformalMeasure& nu, double s, double theta,
                                     int truncation_n, int m,
                                     const std::function<std::complex<double>(double)>& g,
                                     double strip_eps) {
  // resolvent of P_{-(s + i theta)} through its Neumann series
  DiscreteOperator op = discretize(nu, {-s, -theta}, m, strip_eps);
  Eigen::VectorXcd term(m), acc(m);
  for (int j = 0; j < m; ++j) term(j) = g(op.grid.node(j));
  acc = term;
  double last = 0.0;
  for (int k = 1; k <= truncation_n; ++k) {
    term = op.matrix * term;
    last = grid_norm(op, term, NormFlavor::C1);
    if (!std::isfinite(last) || last > 1e8)
      fail(Errc::SeriesDiverging, "Neumann term norm " + std::to_string(last) + " at k = " +
                                      std::to_string(k));
    acc += term;
  }

  ResolventProbeResult res;
  res.terms_used = truncation_n;
  res.tail_norm = last;
  // project onto constants against nu by deterministic cylinder integration
  int depth = static_cast<int>(std::ceil(std::log(1e-10) / std::log(nu.ifs.rho)));
  depth = std::min(depth, 24);
  double re = integrate_cylinder(
      nu, [&](double x) { return op.grid.interpolate<std::complex<double>>(acc, x).real(); },
      depth);
  double im = integrate_cylinder(
      nu, [&](double x) { return op.grid.interpolate<std::complex<double>>(acc, x).imag(); },
      depth);
  res.rank_one_coeff = {re, im};
  Eigen::VectorXcd remainder = acc - Eigen::VectorXcd::Constant(m, res.rank_one_coeff);
  res.remainder_norm = grid_norm(op, remainder, NormFlavor::C1);
  return res;
}

}  // namespace decaylab
