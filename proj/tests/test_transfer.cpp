#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "decaylab/corpus.hpp"
#include "decaylab/transfer.hpp"

using namespace decaylab;

TEST_CASE("discretize: stochasticity at s = 0") {
  for (auto nu : {corpus::cantor_measure(), corpus::gauss24_measure()}) {
    auto op = discretize(nu, 0.0, 64);
    Eigen::VectorXcd ones = Eigen::VectorXcd::Constant(64, 1.0);
    Eigen::VectorXcd out = apply_op(op, ones);
    CHECK((out - ones).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("discretize: leading eigenvalue one by power iteration") {
  auto gauss = corpus::gauss24_measure();
  auto op = discretize(gauss, 0.0, 96);
  Eigen::VectorXcd v(96);
  for (int j = 0; j < 96; ++j) v(j) = 1.0 + 0.3 * std::sin(7.0 * op.grid.node(j));
  double lambda = 0.0;
  for (int it = 0; it < 120; ++it) {
    Eigen::VectorXcd w = op.matrix * v;
    lambda = w.norm() / v.norm();
    v = w / w.norm();
  }
  CHECK(lambda == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("discretize: strip bound") {
  auto gauss = corpus::gauss24_measure();
  CHECK_THROWS_AS(discretize(gauss, {kDefaultStripEps * 1.5, 0.0}, 32), const Error&);
  CHECK_NOTHROW(discretize(gauss, {kDefaultStripEps * 0.5, 0.0}, 32));
  CHECK_THROWS_AS(discretize(gauss, 0.0, 8), const Error&);
}

TEST_CASE("apply_op: linearity and grid mismatch") {
  auto gauss = corpus::gauss24_measure();
  auto op = discretize(gauss, {0.01, 3.0}, 48);
  Eigen::VectorXcd g(48), h(48);
  for (int j = 0; j < 48; ++j) {
    double x = op.grid.node(j);
    g(j) = std::complex<double>(x, std::sin(x));
    h(j) = std::complex<double>(std::cos(3 * x), x * x);
  }
  std::complex<double> a{0.7, -0.2}, b{1.3, 0.4};
  Eigen::VectorXcd lhs = apply_op(op, a * g + b * h);
  Eigen::VectorXcd rhs = a * apply_op(op, g) + b * apply_op(op, h);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::VectorXcd wrong(32);
  CHECK_THROWS_AS(apply_op(op, wrong), const Error&);
}

TEST_CASE("constant cocycle: modulus-one twist of the Cantor operator") {
  // c = log 3 for both maps, so P_{ib}(1) is a modulus-one constant
  auto cantor = corpus::cantor_measure();
  auto op = discretize(cantor, {0.0, 2.7}, 48);
  Eigen::VectorXcd ones = Eigen::VectorXcd::Constant(48, 1.0);
  Eigen::VectorXcd out = apply_op(op, ones);
  std::complex<double> expected = std::exp(std::complex<double>(0.0, 2.0 * M_PI * 2.7 * std::log(3.0)));
  for (int j = 0; j < 48; ++j) CHECK(std::abs(out(j) - expected) < 1e-12);
}

TEST_CASE("semigroup property: matrix powers match the n-step assembly") {
  auto gauss = corpus::gauss24_measure();
  const int m = 512;
  std::complex<double> s{0.02, 4.0};
  auto op1 = discretize(gauss, s, m);
  for (int steps : {2, 4}) {
    auto opn = discretize_nstep(gauss, s, m, steps);
    Eigen::VectorXcd g(m);
    for (int j = 0; j < m; ++j) {
      double x = op1.grid.node(j);
      g(j) = std::exp(std::complex<double>(0.0, 2.0 * M_PI * 3.0 * x)) + 0.5 * x;
    }
    Eigen::VectorXcd via_power = g;
    for (int k = 0; k < steps; ++k) via_power = op1.matrix * via_power;
    Eigen::VectorXcd direct = opn.matrix * g;
    double rel = (via_power - direct).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff();
    CHECK(rel < 1e-8);
  }
}

TEST_CASE("power_norm: fixed point of constants at s = 0") {
  auto gauss = corpus::gauss24_measure();
  auto op = discretize(gauss, 0.0, 64);
  Eigen::VectorXcd ones = Eigen::VectorXcd::Constant(64, 1.0);
  auto rep = power_norm(op, ones, 12, NormFlavor::C1);
  for (double v : rep.norms) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.fitted_alpha == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("power_norm: overflow flags the a-priori bound") {
  auto gauss = corpus::gauss24_measure();
  auto op = discretize(gauss, {0.05, 0.0}, 48);
  Eigen::VectorXcd ones = Eigen::VectorXcd::Constant(48, 1.0);
  CHECK_THROWS_AS(power_norm(op, ones, 400, NormFlavor::C1), const Error&);
}

TEST_CASE("a-priori bound: probe norms under the growth envelope") {
  // the weight is exp(2 pi s c), so the envelope carries the 2 pi factor:
  // ||P_s^n||_(b) <= C6 exp(2 pi n D' |a|)
  auto gauss = corpus::gauss24_measure();
  const double a = 0.03, b = 25.0;
  auto op = discretize(gauss, {a, b}, 128);
  const int n = 20;
  double c6 = 0.0;
  for (auto& g : probe_set(op, b)) {
    auto rep = power_norm(op, g, n, NormFlavor::B);
    for (int k = 1; k <= n; ++k) {
      double bound = std::exp(2.0 * M_PI * k * gauss.ifs.Dprime * std::abs(a));
      c6 = std::max(c6, rep.norms[static_cast<size_t>(k - 1)] / bound);
    }
  }
  CHECK(c6 < 12.0);  // calibration constant stays modest
}

TEST_CASE("spectral_gap_scan: contraction for GAUSS24, resonance for Cantor") {
  auto gauss = corpus::gauss24_measure();
  auto scan = spectral_gap_scan(gauss, 0.0, {25.0, 50.0}, 30, 256);
  for (const auto& row : scan.rows) CHECK(row.alpha < 0.99);

  // b = j / log 3 makes the Cantor twist trivial
  auto cantor = corpus::cantor_measure();
  double b1 = 28.0 / std::log(3.0);
  auto scan_c = spectral_gap_scan(cantor, 0.0, {b1}, 30, 256);
  CHECK(scan_c.rows[0].alpha >= 0.999);

  auto empty = spectral_gap_scan(gauss, 0.0, {}, 10, 64);
  CHECK(empty.rows.empty());
}

TEST_CASE("spectral_gap_scan: alpha stable when the grid doubles") {
  auto gauss = corpus::gauss24_measure();
  auto s256 = spectral_gap_scan(gauss, 0.0, {50.0}, 30, 256);
  auto s512 = spectral_gap_scan(gauss, 0.0, {50.0}, 30, 512);
  CHECK(std::abs(s256.rows[0].alpha - s512.rows[0].alpha) <= 0.02);
}

TEST_CASE("resolvent_probe: pole scaling and mean-zero projection") {
  auto gauss = corpus::gauss24_measure();
  auto chi = lyapunov_cylinder(gauss, 14);

  // theta = 0, small real s: pole direction 1/(2 pi chi s), probed by
  // doubling s and by the vanishing relative offset as s -> 0
  auto g1 = [](double) { return std::complex<double>(1.0, 0.0); };
  double s1 = 0.02, s2 = 0.01, s3 = 0.005;
  auto r1 = resolvent_probe(gauss, s1, 0.0, 6000, 64, g1);
  auto r2 = resolvent_probe(gauss, s2, 0.0, 6000, 64, g1);
  auto r3 = resolvent_probe(gauss, s3, 0.0, 6000, 64, g1);
  CHECK(std::abs(r2.rank_one_coeff / r1.rank_one_coeff) == doctest::Approx(2.0).epsilon(0.05));
  double off1 = std::abs(std::abs(r1.rank_one_coeff) * 2.0 * M_PI * chi * s1 - 1.0);
  double off3 = std::abs(std::abs(r3.rank_one_coeff) * 2.0 * M_PI * chi * s3 - 1.0);
  CHECK(off3 < off1);
  CHECK(off3 < 0.06);

  // theta far from zero: series converges and the remainder stays finite
  auto osc = resolvent_probe(gauss, 0.01, 40.0, 600, 128,
                             [](double x) { return std::complex<double>(x, 1.0 - x); });
  CHECK(std::isfinite(osc.remainder_norm));
  CHECK(osc.tail_norm < 1e-3);

  // mean-zero input has a near-zero constant component at small s
  double mean_x = integrate_cylinder(gauss, [](double x) { return x; }, 14);
  auto g0 = [mean_x](double x) { return std::complex<double>(x - mean_x, 0.0); };
  auto r0 = resolvent_probe(gauss, 0.02, 0.0, 2000, 64, g0);
  CHECK(std::abs(r0.rank_one_coeff) < 0.2 * std::abs(r1.rank_one_coeff));
}
