#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "decaylab/corpus.hpp"
#include "decaylab/parallel.hpp"
#include "oracles.hpp"

using namespace decaylab;

TEST_CASE("sample_points: supports and determinism") {
  auto cantor = corpus::cantor_measure();
  auto pts = sample_points(cantor, 5000, 30, 42);
  for (double x : pts) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    bool in_gap = x > 1.0 / 3.0 + 1e-12 && x < 2.0 / 3.0 - 1e-12;
    CHECK_FALSE(in_gap);
  }

  auto gauss = corpus::gauss24_measure();
  for (double x : sample_points(gauss, 5000, 20, 43)) {
    CHECK(x >= 0.2 - 1e-12);
    CHECK(x <= 0.5 + 1e-12);
  }

  CHECK(sample_points(gauss, 100, 12, 7) == sample_points(gauss, 100, 12, 7));
  CHECK(sample_points(gauss, 100, 12, 7) != sample_points(gauss, 100, 12, 8));
}

TEST_CASE("fourier_cylinder: total mass and conjugate symmetry") {
  auto gauss = corpus::gauss24_measure();
  auto at0 = fourier_cylinder(gauss, 0.0, 1e-9);
  CHECK(at0.value == std::complex<double>(1.0, 0.0));
  CHECK(at0.error_bound == 0.0);

  for (double q : {1.0, 7.5, 33.0}) {
    auto plus = fourier_cylinder(gauss, q, 1e-8);
    auto minus = fourier_cylinder(gauss, -q, 1e-8);
    CHECK(std::abs(plus.value - std::conj(minus.value)) < 1e-14);
    CHECK(std::abs(plus.value) <= 1.0 + plus.error_bound);
  }
}

TEST_CASE("fourier_cylinder: refinement identity at depth m") {
  // sum over depth-m cylinders equals the p-mixture of depth-(m-1) sums
  // pushed through each map
  auto gauss = corpus::gauss24_measure();
  const double q = 9.0, tol = 1e-5;
  auto est = fourier_cylinder(gauss, q, tol);
  const int m = est.depth;
  REQUIRE(m >= 2);

  std::complex<double> mixture = 0.0;
  const double w = 2.0 * M_PI * q;
  std::function<void(int, double, double)> dfs = [&](int depth, double point, double weight) {
    if (depth == m - 1) {
      for (int a = 0; a < gauss.alphabet(); ++a) {
        double y = gauss.ifs.maps[a](point);
        mixture += weight * gauss.p[a] * std::complex<double>(std::cos(w * y), std::sin(w * y));
      }
      return;
    }
    for (int s = 0; s < gauss.alphabet(); ++s)
      dfs(depth + 1, gauss.ifs.maps[s](point), weight * gauss.p[s]);
  };
  dfs(0, gauss.ifs.x0, 1.0);
  CHECK(std::abs(est.value - mixture) < 1e-13);
}

TEST_CASE("fourier_cylinder: Cantor lattice recursion") {
  // F_{3q} = F_q on integers for the middle-thirds measure; the product
  // formula gives the exact modulus
  auto cantor = corpus::cantor_measure();
  double base = std::abs(fourier_cylinder(cantor, 1.0, 1e-6).value);
  CHECK(base == doctest::Approx(oracles::cantor_fourier_modulus(1.0)).epsilon(1e-5));
  CHECK(base > 0.37);  // non-Rajchman scale
  double q = 1.0;
  for (int j = 1; j <= 6; ++j) {
    q *= 3.0;
    double v = std::abs(fourier_cylinder(cantor, q, 1e-6).value);
    CHECK(std::abs(v - base) <= 2e-6);
  }
}

TEST_CASE("fourier_cylinder: tolerance self-consistency") {
  auto gauss = corpus::gauss24_measure();
  auto a = fourier_cylinder(gauss, 10.0, 1e-6);
  auto b = fourier_cylinder(gauss, 10.0, 1e-8);
  CHECK(std::abs(a.value - b.value) <= 2e-6);
}

TEST_CASE("fourier_cylinder: cost cap") {
  auto gauss = corpus::gauss24_measure();
  CHECK_THROWS_AS(fourier_cylinder(gauss, 1e9, 1e-8, 100000), const Error&);
}

TEST_CASE("fourier_mc: q=0 exact and oracle cross-check") {
  auto cantor = corpus::cantor_measure();
  auto at0 = fourier_mc(cantor, 0.0, 1000, 30, 5);
  CHECK(at0.value == std::complex<double>(1.0, 0.0));
  CHECK(at0.stderr_re == 0.0);

  auto mc = fourier_mc(cantor, 1.0, 1'000'000, 40, 12345);
  auto cyl = fourier_cylinder(cantor, 1.0, 1e-8);
  CHECK(std::abs(mc.value - cyl.value) <= 1e-8 + 4.0 * mc.stderr_combined());

  auto gauss = corpus::gauss24_measure();
  auto mc2 = fourier_mc(gauss, 100.0, 1'000'000, 40, 999);
  auto cyl2 = fourier_cylinder(gauss, 100.0, 1e-8);
  CHECK(std::abs(mc2.value - cyl2.value) <= 1e-8 + 4.0 * mc2.stderr_combined());
}

TEST_CASE("estimator agreement over a random corpus") {
  // |cylinder - mc| <= tol + 4 stderr on at least 95% of (nu, q) draws
  std::vector<SelfConformalMeasure> corpus_measures = {corpus::cantor_measure(),
                                                       corpus::gauss24_measure()};
  Rng rng(2024, 0);
  int pass = 0, total = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto& nu = corpus_measures[trial % corpus_measures.size()];
    double q = 1.0 + 60.0 * rng.u01();
    auto cyl = fourier_cylinder(nu, q, 1e-6);
    auto mc = fourier_mc(nu, q, 40000, 35, 100 + trial);
    if (std::abs(cyl.value - mc.value) <= 1e-6 + 4.0 * mc.stderr_combined()) ++pass;
    ++total;
  }
  CHECK(pass >= static_cast<int>(0.95 * total));

  // the slower-contracting quadratic pair, one dedicated cross-check
  auto nl = corpus::nonlin2_measure();
  auto cyl = fourier_cylinder(nl, 15.0, 1e-5);
  auto mc = fourier_mc(nl, 15.0, 200000, 45, 4242);
  CHECK(std::abs(cyl.value - mc.value) <= 1e-5 + 4.0 * mc.stderr_combined());
}

TEST_CASE("decay_exponent: Cantor blocks at powers of three stay flat") {
  auto cantor = corpus::cantor_measure();
  auto rep = decay_exponent(cantor, 3.0, std::pow(3.0, 6.0), 5, 64);
  // short ranges carry a transient from the first blocks; the sups stay
  // pinned above the lattice floor |F(1)| and the fitted decay is small
  CHECK(std::abs(rep.alpha_hat) < 0.1);
  double floor_val = oracles::cantor_fourier_modulus(1.0);
  for (const auto& blk : rep.blocks) CHECK(blk.sup_modulus >= floor_val - 2e-4);
}

TEST_CASE("decay_exponent: GAUSS24 decays") {
  auto gauss = corpus::gauss24_measure();
  auto rep = decay_exponent(gauss, 16.0, 4096.0, 8, 32);
  CHECK(rep.alpha_hat > 0.0);
}

TEST_CASE("decay_exponent: uniform measure kills integer frequencies") {
  auto uni = corpus::uniform_measure();
  // dyadic points make the estimator vanish identically at integers as soon
  // as the enumeration depth resolves q
  for (double q : {1.0, 2.0, 5.0, 17.0})
    CHECK(std::abs(fourier_cylinder(uni, q, 1e-3).value) < 1e-12);
  auto rep = decay_exponent(uni, 4.0, 128.0, 5, 24, 1e-3);
  CHECK(rep.alpha_hat > 0.8);
}

TEST_CASE("frostman_exponent: uniform and Cantor dimensions") {
  std::vector<double> r_grid;
  for (int i = 0; i < 8; ++i) r_grid.push_back(0.1 * std::pow(0.5, i));

  auto uni = corpus::uniform_measure();
  auto rep_u = frostman_exponent(uni, r_grid, 400000, 31);
  CHECK(rep_u.d_hat == doctest::Approx(1.0).epsilon(0.05));

  auto cantor = corpus::cantor_measure();
  auto rep_c = frostman_exponent(cantor, r_grid, 400000, 32);
  double want = std::log(2.0) / std::log(3.0);
  CHECK(rep_c.d_hat == doctest::Approx(want).epsilon(0.08));

  // independent oracle: exact window masses of the Cantor measure
  for (size_t i = 0; i < r_grid.size(); ++i) {
    double exact = oracles::cantor_window_mass(2.0 * r_grid[i]);
    CHECK(rep_c.sup_mass[i] == doctest::Approx(exact).epsilon(0.08));
  }
}

TEST_CASE("lyapunov: constants and bounds") {
  auto cantor = corpus::cantor_measure();
  auto est = lyapunov(cantor, 20000, 30, 77);
  CHECK(est.chi == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(est.stderr_value < 1e-7);  // zero variance up to rounding

  auto uni = corpus::uniform_measure();
  CHECK(lyapunov(uni, 10000, 30, 78).chi == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  auto gauss = corpus::gauss24_measure();
  auto a = lyapunov(gauss, 200000, 30, 79);
  auto b = lyapunov(gauss, 200000, 30, 80);
  CHECK(a.chi >= gauss.ifs.D);
  CHECK(a.chi <= gauss.ifs.Dprime);
  CHECK(std::abs(a.chi - b.chi) <= 4.0 * std::hypot(a.stderr_value, b.stderr_value));

  // deterministic cylinder integration agrees with Monte Carlo
  double chi_det = lyapunov_cylinder(gauss, 18);
  CHECK(std::abs(a.chi - chi_det) <= 4.0 * a.stderr_value);
}

TEST_CASE("decay_exponent: worker count does not change the numbers") {
  auto gauss = corpus::gauss24_measure();
  auto serial = decay_exponent(gauss, 16.0, 512.0, 5, 16);
  thread_count() = 4;
  auto parallel = decay_exponent(gauss, 16.0, 512.0, 5, 16);
  thread_count() = 1;
  CHECK(serial.alpha_hat == parallel.alpha_hat);
  for (size_t i = 0; i < serial.blocks.size(); ++i)
    CHECK(serial.blocks[i].sup_modulus == parallel.blocks[i].sup_modulus);
}

TEST_CASE("measure construction rejects bad p") {
  CHECK_THROWS_AS(make_measure(corpus::cantor(), {0.5, 0.6}), const Error&);
  CHECK_THROWS_AS(make_measure(corpus::cantor(), {1.0, 0.0}), const Error&);
  CHECK_THROWS_AS(make_measure(corpus::cantor(), {0.5, 0.25, 0.25}), const Error&);
}
