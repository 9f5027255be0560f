#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "decaylab/corpus.hpp"
#include "decaylab/pipeline.hpp"

using namespace decaylab;

TEST_CASE("schedule: closed forms and inverse consistency") {
  const double eps = 0.05;
  double k = 10.0;
  double q = std::exp(k * (1.0 + eps / 7.0));
  auto entries = schedule({q}, eps);
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].k == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(entries[0].r == doctest::Approx(std::exp(-k * eps / 100.0)).epsilon(1e-12));
  CHECK(entries[0].beta == 0.5);

  // all three predicted terms decay in k
  CHECK(ScheduleEntry::lin_rate(eps) > 0.0);
  CHECK(ScheduleEntry::equi_rate(eps) > 0.0);
  CHECK(ScheduleEntry::osc_rate(eps) > 0.0);
  // linearization exponent: eps/8 + eps/16 > eps/7 for every eps
  CHECK(1.0 / 8.0 + 1.0 / 16.0 > 1.0 / 7.0);

  CHECK(schedule({}, eps).empty());
  // k(q) strictly increasing in |q|
  auto more = schedule({10.0, 100.0, 1000.0}, eps);
  CHECK(more[0].k < more[1].k);
  CHECK(more[1].k < more[2].k);
}

TEST_CASE("linearization_gap: small q keeps both sides near one") {
  auto nl = corpus::nonlin2_measure();  // orientation-preserving corpus member
  auto gap = linearization_gap(nl, 1.0, 2.0, 200, 7);
  CHECK(gap.lhs <= 1.0);
  CHECK(gap.rhs_mc <= 1.0 + 1e-9);
  CHECK(gap.slack >= -4.0 * gap.rhs_stderr);
}

TEST_CASE("linearization_gap: scheduled GAUSS24 points hold within noise") {
  auto gauss = corpus::gauss24_measure();
  for (double q : {64.0, 512.0}) {
    auto entries = schedule({q}, 0.05);
    auto gap = linearization_gap(gauss, q, entries[0].k, 400, 11);
    CHECK(gap.slack >= -4.0 * gap.rhs_stderr);
    CHECK(gap.c_prime >= 1.0);
    CHECK(gap.c_prime < 1e4);  // bracket constant stays finite
  }
}

TEST_CASE("linearization_gap: mixed orientation is rejected") {
  // one increasing and one decreasing branch
  auto mixed = make_measure(
      validate_ifs({make_affine(0.3, 0.05), make_moebius(2.0)}), corpus::uniform_p(2));
  CHECK_THROWS_AS(linearization_gap(mixed, 8.0, 2.0, 50, 3), const Error&);
}

TEST_CASE("oscillatory_bound: trivial regimes") {
  auto gauss = corpus::gauss24_measure();
  // r beyond the support diameter makes the mass term one
  auto wide = oscillatory_bound(gauss, 100.0, 4.0, 0.9, 60, 17);
  CHECK(wide.sup_mass == doctest::Approx(1.0));
  CHECK(wide.bound_value >= 1.0);

  // q -> 0: integrand is near one, integral near D'
  auto small = oscillatory_bound(gauss, 0.05, 3.0, 0.1, 60, 19);
  CHECK(small.integral_estimate ==
        doctest::Approx(2.0 * gauss.ifs.Dprime).epsilon(0.35));  // induced D' doubles
}

TEST_CASE("oscillatory_bound: scheduled point respects the bound scale") {
  auto gauss = corpus::gauss24_measure();
  auto entries = schedule({512.0}, 0.05);
  auto ob = oscillatory_bound(gauss, 512.0, entries[0].k, entries[0].r, 150, 23);
  CHECK(ob.integral_estimate > 0.0);
  CHECK(ob.integral_estimate <= 10.0 * ob.bound_value);
}

TEST_CASE("decay_report: lattice flag short-circuits") {
  auto cantor = corpus::cantor_measure();
  DecayPipelineOptions opts;
  opts.q_min = 81.0;
  opts.q_max = 81.0 * std::pow(3.0, 5.0);
  opts.blocks = 5;
  opts.samples_per_block = 32;
  auto rep = decay_report(cantor, opts);
  CHECK(rep.lattice);
  CHECK(rep.lattice_span == doctest::Approx(std::log(3.0)).epsilon(1e-6));
  CHECK(std::abs(rep.alpha_hat) < 0.02);
  CHECK(rep.linearization.empty());
}

TEST_CASE("decay_report: GAUSS24 smoke at reduced cost") {
  auto gauss = corpus::gauss24_measure();
  DecayPipelineOptions opts;
  opts.q_min = 16.0;
  opts.q_max = 1024.0;
  opts.blocks = 6;
  opts.samples_per_block = 16;
  opts.scheduled_points = 3;
  opts.lin_mc = 200;
  opts.osc_mc = 60;
  opts.equi_mc = 20000;
  auto rep = decay_report(gauss, opts);
  CHECK_FALSE(rep.lattice);
  CHECK(rep.alpha_hat > 0.0);
  CHECK(rep.entries.size() == 3);
  CHECK(rep.linearization.size() == 3);
  CHECK(rep.oscillatory.size() == 3);
  CHECK(rep.terms.size() == 3);
  CHECK(rep.lin_pass_fraction >= 2.0 / 3.0);
}
