#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "mfunc/approximant.hpp"

using namespace mfunc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("smoothing weight", "[approximant]") {
  REQUIRE(weight_w(100, 50) == 1.0);
  REQUIRE(weight_w(100, 100) == 1.0);
  REQUIRE_THAT(weight_w(100, 1000), WithinAbs(0.5, 1e-15));
  REQUIRE(weight_w(100, 10000) == 0.0);
  REQUIRE(weight_w(100, 20000) == 0.0);
  // continuity at the joints
  REQUIRE_THAT(weight_w(100, 101), WithinAbs(1.0, 3e-3));
  REQUIRE_THAT(weight_w(100, 9999), WithinAbs(0.0, 3e-5));
  REQUIRE_THROWS_AS(weight_w(1.0, 5), std::invalid_argument);
  REQUIRE_THROWS_AS(weight_w(100, 0), std::invalid_argument);
}

TEST_CASE("approximant values at t = 0 against hand sums", "[approximant]") {
  auto zeta = LFunctionSpec::zeta();

  SECTION("f-variant, X = 2, sigma = 2") {
    Approximant f({zeta, 2.0, 2.0, ApproximantVariant::f});
    const double expect = -(std::log(2.0) / 4.0 +
                            std::log(4.0 / 3.0) / std::log(2.0) * std::log(3.0) / 9.0);
    REQUIRE_THAT(f(0.0).real(), WithinAbs(expect, 1e-13));
    REQUIRE_THAT(f(0.0).real(), WithinAbs(-0.223950, 1e-6));
    REQUIRE(f(0.0).imag() == 0.0);
  }

  SECTION("g-variant, X = 2, sigma = 2") {
    Approximant g({zeta, 2.0, 2.0, ApproximantVariant::g});
    const double expect = -(std::log(2.0) / 4.0 + std::log(3.0) / 9.0 + std::log(2.0) / 16.0);
    REQUIRE_THAT(g(0.0).real(), WithinAbs(expect, 1e-13));
  }

  SECTION("h-variant, X = 2, sigma = 2: full local series") {
    Approximant h({zeta, 2.0, 2.0, ApproximantVariant::h});
    const double expect = -(std::log(2.0) / 3.0 + std::log(3.0) / 8.0);
    REQUIRE_THAT(h(0.0).real(), WithinAbs(expect, h.tail_cert() + 1e-12));
  }
}

TEST_CASE("approximant symmetry and crude bound", "[approximant]") {
  auto zeta = LFunctionSpec::zeta();
  Approximant f({zeta, 1.1, 5.0, ApproximantVariant::f});
  for (double t : {0.3, 2.7, 41.0}) {
    REQUIRE(std::abs(f(t) - std::conj(f(-t))) < 1e-13);
  }
  const double crude = f.coeff_abs_sum();
  for (double t : {0.0, 1.0, 17.3, 400.0}) REQUIRE(std::abs(f(t)) <= crude + 1e-12);
}

TEST_CASE("progression evaluation matches pointwise and is thread-invariant",
          "[approximant]") {
  auto zeta = LFunctionSpec::zeta();
  Approximant f({zeta, 1.2, 30.0, ApproximantVariant::f});
  const double t0 = 0.37, dt = 0.011;
  auto batch1 = f.evaluate_progression(t0, dt, 5000, 1);
  auto batch3 = f.evaluate_progression(t0, dt, 5000, 3);
  REQUIRE(batch1.size() == 5000);
  for (std::size_t j = 0; j < batch1.size(); ++j) {
    REQUIRE(batch1[j] == batch3[j]);  // bit-identical across thread counts
    if (j % 617 == 0)
      REQUIRE(std::abs(batch1[j] - f(t0 + j * dt)) < 1e-10);
  }
}

TEST_CASE("f/g/h cross differences shrink as sigma grows", "[approximant]") {
  auto zeta = LFunctionSpec::zeta();
  auto mean_gap = [&](double sigma, ApproximantVariant a, ApproximantVariant b) {
    Approximant fa({zeta, sigma, 6.0, a});
    Approximant fb({zeta, sigma, 6.0, b});
    double s = 0;
    for (int i = 0; i < 40; ++i) {
      const double t = 0.71 * i;
      s += std::abs(fa(t) - fb(t));
    }
    return s / 40;
  };
  REQUIRE(mean_gap(2.0, ApproximantVariant::f, ApproximantVariant::g) <
          mean_gap(0.8, ApproximantVariant::f, ApproximantVariant::g));
  REQUIRE(mean_gap(2.0, ApproximantVariant::g, ApproximantVariant::h) <
          mean_gap(0.8, ApproximantVariant::g, ApproximantVariant::h));
}

TEST_CASE("schedule", "[approximant]") {
  SECTION("worked example at theta = delta = 0.1, log T = 64") {
    const auto s = schedule(0.1, 0.1, std::exp(64.0));
    REQUIRE_THAT(s.theta1, WithinAbs(1.0 / 6.0, 1e-15));
    REQUIRE_THAT(s.X, WithinRel(std::exp(2.0), 1e-12));
    REQUIRE_THAT(s.theta2, WithinAbs((1.0 / 6.0 + 0.9) / 2.0, 1e-15));
    REQUIRE_THAT(s.theta3, WithinAbs(0.73333333333333333, 1e-14));
    REQUIRE(s.N == 42);
    REQUIRE_THAT(s.omega_half_width, WithinRel(std::pow(64.0, 0.1), 1e-13));
  }
  SECTION("hypothesis boundary and domain errors") {
    REQUIRE_THROWS_AS(schedule(0.1, 0.2, 1e5), std::invalid_argument);  // delta+3theta = 0.5
    REQUIRE_THROWS_AS(schedule(0.0, 0.1, 1e5), std::invalid_argument);
    REQUIRE_THROWS_AS(schedule(0.1, 0.1, 2.0), std::invalid_argument);  // T <= e
  }
  SECTION("derived values stay admissible") {
    for (double theta : {0.01, 0.05, 0.12})
      for (double delta : {0.01, 0.08})
        for (double T : {10.0, 1e4, 1e12}) {
          const auto s = schedule(theta, delta, T);
          REQUIRE(s.N % 2 == 0);
          REQUIRE(s.N >= 2);
          REQUIRE(s.X > 1.0);
          REQUIRE(s.Y > 1.0);
        }
  }
}

TEST_CASE("error budget", "[approximant]") {
  auto zeta = LFunctionSpec::zeta();

  SECTION("|z| = 0 drops the z blocks") {
    const auto s = schedule(0.1, 0.1, std::exp(32.0));
    const auto b = error_budget(zeta, s, 1.2, 0.0, false);
    REQUIRE(b.e2 == 0.0);
    REQUIRE(b.e4 == 0.0);
    // independent evaluation of the z-free part of E1
    const double L = 32.0, gap = 1.2 - (1.0 - 1.0 / 16.0 + b.epsilon / 2.0);
    const double expect = 1.0 / s.T + s.Y * std::exp(-(16.0 / 2.0) * gap * L);
    REQUIRE_THAT(b.e1, WithinRel(expect, 1e-10));
  }

  SECTION("E3 by hand at N = 4, X = e, T = e^10, sigma = 1, |z| = 1") {
    ScheduleParams p;
    p.T = std::exp(10.0);
    p.X = std::exp(1.0);
    p.Y = std::exp(3.0);
    p.N = 4;
    const auto b = error_budget(zeta, p, 1.0, 1.0, false);
    const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
    const double zetap2 = 0.93754825431584375;  // |zeta'(2)|, literature value
    const double term1 = std::exp(20.0 - 10.0) * std::pow(2.0, 2.0);  // gamma(5) = 24 below
    const double term2 = std::pow(8.0, 4) / 24.0 * (1.0 + std::exp(4.0 - 10.0)) *
                         (std::pow(std::sqrt(zeta2), 4) * 2.0 + std::pow(zetap2, 4));
    REQUIRE_THAT(b.e3, WithinRel(term1 + term2, 1e-9));
  }

  SECTION("desk-scale scan and asymptotic turnover") {
    // On T in {e^16, e^32, e^64} the budgets split: e2 and e4 decrease, while
    // e1 (through X^{-gap/2} log T / gap^2) and e3 (through X^{5N}/T) still
    // grow -- with the schedule exponents X grows far too slowly for their
    // decay blocks to win before astronomically large T.
    std::vector<ErrorBudget> bs;
    for (double L : {16.0, 32.0, 64.0})
      bs.push_back(error_budget(zeta, schedule(0.1, 0.1, std::exp(L)), 1.2, 1.0, false));
    REQUIRE(bs[0].e2 > bs[1].e2);
    REQUIRE(bs[1].e2 > bs[2].e2);
    REQUIRE(bs[0].e4 > bs[1].e4);
    REQUIRE(bs[1].e4 > bs[2].e4);
    REQUIRE(bs[0].log_e1 < bs[1].log_e1);
    REQUIRE(bs[0].log_e3 < bs[1].log_e3);
    REQUIRE(bs[1].log_e3 < bs[2].log_e3);

    // symbolic shape checks beyond the turnover threshold: both rising blocks
    // eventually decrease in T (log T ~ 10^13 suffices at theta = delta = 0.1)
    const double theta = 0.1, delta = 0.1, sigma = 1.2, b = 16.0;
    const double eps = sigma - (1.0 - 1.0 / b);
    const double gap = sigma - (1.0 - 1.0 / b + eps / 2.0);
    auto log_e1_block = [&](double L) {
      const double theta1 = 5.0 / 3.0 * theta;
      return -0.5 * gap * std::pow(L, theta1) + std::log(L) - 2.0 * std::log(gap);
    };
    auto log_e3_first = [&](double L) {
      const double theta1 = 5.0 / 3.0 * theta;
      const double theta3 = ((2 * delta + theta + 2 * theta1) + (1 - theta1)) / 2.0;
      return 10.0 * std::pow(L, theta3 + theta1) - L;
    };
    REQUIRE(log_e1_block(2e13) < log_e1_block(1e13));
    REQUIRE(log_e3_first(2e13) < log_e3_first(1e13));
    REQUIRE(log_e3_first(1e13) < 0.0);
  }

  SECTION("metadata requirements") {
    std::map<std::uint64_t, LFunctionSpec::Roots> t{{2, {{1.0, 0.0}}}, {3, {{1.0, 0.0}}}};
    auto bare = LFunctionSpec::custom("bare", 1, t);
    const auto s = schedule(0.1, 0.1, 1e5);
    REQUIRE_THROWS_AS(error_budget(bare, s, 1.2, 1.0, false), std::invalid_argument);
    REQUIRE_THROWS_AS(error_budget(zeta, s, 1.2, 1.0, true), std::invalid_argument);
    auto meta = zeta.metadata();
    meta.c = 1.0;
    meta.A = 2.0;
    const auto b = error_budget(zeta.with_metadata(meta), s, 0.8, 1.0, true);
    REQUIRE(std::isfinite(b.e1));
    REQUIRE(b.e1 > 0);
  }
}

TEST_CASE("direct series equals the g-variant sum", "[approximant]") {
  auto zeta = LFunctionSpec::zeta();
  const double sigma = 2.0;
  const double X = 10.0;
  Approximant g({zeta, sigma, X, ApproximantVariant::g});
  const auto d = direct_series(zeta, sigma, 100);
  for (double t : {0.0, 1.7, 23.0}) {
    std::complex<double> dv{0, 0};
    for (std::size_t i = 0; i < d.logn.size(); ++i) {
      const double ph = -t * d.logn[i];
      dv += d.coeff[i] * std::complex<double>{std::cos(ph), std::sin(ph)};
    }
    REQUIRE(std::abs(dv - g(t)) < 1e-12);
  }
  REQUIRE(d.tail_cert > 0);
  REQUIRE(d.tail_cert < 0.5);
  REQUIRE_THROWS_AS(direct_series(zeta, 1.0, 100), std::domain_error);
}
