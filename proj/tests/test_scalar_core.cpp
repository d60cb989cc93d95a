#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "copson/scalar_core.hpp"

using namespace copson;

namespace {

Params make(double p, double c, std::optional<double> alpha = std::nullopt, bool reverse = false) {
  Params P;
  P.p = p;
  P.c = c;
  P.alpha = alpha;
  P.reverse = reverse;
  return P;
}

// straight transcription, used as an independent oracle
double f_plain(double p, double c, double x) {
  const double t = (1.0 - c) / p;
  return std::pow(1.0 + t * x, 1.0 - p) - std::pow(1.0 - x, 1.0 - c) - t * x;
}

}  // namespace

TEST_SUITE("scalar_core") {

TEST_CASE("closed-form values") {
  CHECK(scalar_eval(ScalarFn::FLemma, make(2, 0), 0.0) == 0.0);
  CHECK(scalar_eval(ScalarFn::FLemma, make(2, 0), 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(scalar_eval(ScalarFn::FAlpha, make(2, 0, 1.0), 1.0) == doctest::Approx(0.25).epsilon(1e-15));
  const double d = scalar_eval(ScalarFn::Lhs32, make(2, 0, 1.0), 1.0) -
                   scalar_eval(ScalarFn::Rhs32, make(2, 0, 1.0), 1.0);
  CHECK(d == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cond_26(2.0, -0.1) == doctest::Approx(1.0 / 1.55 - 0.55).epsilon(1e-14));
}

TEST_CASE("f matches its plain transcription") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> up(1.05, 8.0), uc(-4.0, 0.9), ux(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double p = up(rng), c = uc(rng), x = ux(rng);
    CHECK(scalar_eval(ScalarFn::FLemma, make(p, c), x) ==
          doctest::Approx(f_plain(p, c, x)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS((void)scalar_eval(ScalarFn::FLemma, make(2, 0), 1.5), std::domain_error);
  CHECK_THROWS_AS((void)scalar_eval(ScalarFn::FLemma, make(2, 0), -0.1), std::domain_error);
  // (1-x)^{-c} at x = 1 with c > 0
  CHECK_THROWS_AS((void)scalar_eval(ScalarFn::FLemmaD1, make(0.5, 0.2), 1.0), std::domain_error);
  CHECK_THROWS_AS((void)check_condition(Condition::Cond32, make(2, 0), 4096), std::invalid_argument);
  CHECK_THROWS_AS((void)check_condition(Condition::Lemma21, make(2, 0), 16), std::invalid_argument);
}

TEST_CASE("check_condition examples") {
  const auto pass = check_condition(Condition::Lemma21, make(2, -0.1), 4096);
  CHECK(pass.pass);
  CHECK(pass.min_value >= -1e-12);
  CHECK_FALSE(pass.witness.has_value());

  const auto fail = check_condition(Condition::Lemma21, make(2, -0.5), 4096);
  CHECK_FALSE(fail.pass);
  REQUIRE(fail.witness.has_value());
  CHECK(fail.witness->x == 1.0);
  CHECK(fail.witness->value == doctest::Approx(1.0 / 1.75 - 0.75).epsilon(1e-14));

  const auto fa = check_condition(Condition::FAlphaNonneg, make(2, 0, 0.5), 4096);
  CHECK_FALSE(fa.pass);
  REQUIRE(fa.witness.has_value());
  CHECK(fa.witness->x == 1.0);
  CHECK(fa.witness->value == doctest::Approx(-0.25).epsilon(1e-14));

  CHECK(check_condition(Condition::FAlphaNonneg, make(2, 0, 0.75), 4096).pass);
  CHECK(check_condition(Condition::Cond32, make(2, 0, 1.0), 4096).pass);
}

TEST_CASE("solve_c0 closed forms") {
  CHECK(std::abs(solve_c0(2.0).c0 - (2.0 - std::sqrt(5.0))) < 1e-12);
  CHECK(std::abs(solve_c0(0.5).c0 - (3.0 - std::sqrt(5.0)) / 4.0) < 1e-12);
  const auto one = solve_c0(1.0);
  CHECK(one.degenerate);
  CHECK(one.c0 == 0.0);
  CHECK_THROWS_AS((void)solve_c0(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)solve_c0(-1.0), std::invalid_argument);
}

TEST_CASE("c0 sits strictly between 1 - p and 0 for p > 1") {
  for (double p : {1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0}) {
    const auto s = solve_c0(p);
    CHECK(s.c0 < 0.0);
    CHECK(s.c0 > 1.0 - p);
    CHECK(std::abs(cond_26(p, s.c0)) < 1e-10);
  }
}

TEST_CASE("derivatives agree with central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> up(1.1, 6.0), uc(-3.0, 0.9), ux(0.05, 0.95);
  for (int k = 0; k < 20; ++k) {
    const Params P = make(up(rng), uc(rng));
    for (int i = 0; i < 100; ++i) {
      const double x = ux(rng);
      const double h = 1e-5;
      const double fd1 = (scalar_eval(ScalarFn::FLemma, P, x + h) -
                          scalar_eval(ScalarFn::FLemma, P, x - h)) / (2 * h);
      const double d1 = scalar_eval(ScalarFn::FLemmaD1, P, x);
      CHECK(std::abs(fd1 - d1) <= 1e-6 * std::max(1.0, std::abs(d1)));
      const double fd2 = (scalar_eval(ScalarFn::FLemmaD1, P, x + h) -
                          scalar_eval(ScalarFn::FLemmaD1, P, x - h)) / (2 * h);
      const double d2 = scalar_eval(ScalarFn::FLemmaD2, P, x);
      CHECK(std::abs(fd2 - d2) <= 1e-6 * std::max(1.0, std::abs(d2)));
    }
  }
}

TEST_CASE("g vanishes where f'' does") {
  // p > 1, c < 0: f'' has its zero where g does
  for (const auto& [p, c] : {std::pair{2.0, -0.5}, std::pair{3.0, -1.0}, std::pair{1.5, -0.2}}) {
    const Params P = make(p, c);
    double lo = 0.0, hi = 1.0 - 1e-9;
    const double glo = scalar_eval(ScalarFn::GAux, P, lo);
    if (glo * scalar_eval(ScalarFn::GAux, P, hi) > 0.0) continue;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (scalar_eval(ScalarFn::GAux, P, mid) * glo > 0.0 ? lo : hi) = mid;
    }
    const double scale = std::abs(scalar_eval(ScalarFn::FLemmaD2, P, 0.0)) + 1.0;
    CHECK(std::abs(scalar_eval(ScalarFn::FLemmaD2, P, lo)) < 1e-8 * scale);
  }
}

TEST_CASE("COND26 verdict flips once, at c0") {
  for (double p : {1.3, 2.0, 4.0, 9.0}) {
    const double c0 = solve_c0(p).c0;
    double lo = c0 - 1.0, hi = c0 + 0.5;  // FAIL at lo, PASS at hi
    REQUIRE_FALSE(check_condition(Condition::Cond26, make(p, lo), 64, 1e-15).pass);
    REQUIRE(check_condition(Condition::Cond26, make(p, hi), 64, 1e-15).pass);
    int flips = 0;
    bool last = false;
    for (int i = 0; i <= 400; ++i) {
      const double c = lo + (hi - lo) * i / 400.0;
      const bool v = check_condition(Condition::Cond26, make(p, c), 64, 1e-15).pass;
      if (i > 0 && v != last) ++flips;
      last = v;
    }
    CHECK(flips == 1);
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (check_condition(Condition::Cond26, make(p, mid), 64, 1e-15).pass ? hi : lo) = mid;
    }
    CHECK(std::abs(hi - c0) < 1e-9);
  }
}

TEST_CASE("RHS of the BG scalar condition is nonincreasing in alpha") {
  for (double p : {1.5, 2.0, 4.0}) {
    for (int i = 1; i <= 50; ++i) {
      const double x = i / 50.0;
      double last = scalar_eval(ScalarFn::Rhs32, make(p, 0, 0.05), x);
      for (double a = 0.1; a <= 3.0; a += 0.05) {
        const double v = scalar_eval(ScalarFn::Rhs32, make(p, 0, a), x);
        CHECK(v <= last + 1e-12);
        last = v;
      }
    }
  }
}

TEST_CASE("lemma endpoint principle on random parameters") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> up(1.0, 10.0), uc(-5.0, 0.0);
  int disagreements = 0;
  for (int i = 0; i < 50; ++i) {
    double p = up(rng);
    if (p == 1.0) p = 1.5;
    const double c = uc(rng);
    const bool grid = check_condition(Condition::Lemma21, make(p, c), 4096, 1e-12).pass;
    const bool endpoint = scalar_eval(ScalarFn::FLemma, make(p, c), 1.0) >= -1e-12;
    if (grid != endpoint) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("reverse orientation for 0 < p < 1") {
  // 0 < c < c0(1/2): the reversed lemma inequality holds
  CHECK(check_condition(Condition::Lemma21, make(0.5, 0.1, std::nullopt, true), 4096).pass);
  CHECK_FALSE(check_condition(Condition::Lemma21, make(0.5, 0.5, std::nullopt, true), 4096).pass);
}

TEST_CASE("Hadamard midpoint bound") {
  for (double p : {1.01, 1.5, 2.0, 3.0, 7.0, 50.0}) {
    const auto r = check_condition(Condition::Hadamard, make(p, 0), 4096);
    CHECK(r.pass);
    CHECK(r.min_value >= -1e-12);
  }
}

}  // TEST_SUITE
