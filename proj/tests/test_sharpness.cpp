#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "copson/parallel.hpp"
#include "copson/scalar_core.hpp"
#include "copson/sharpness.hpp"

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

double dense_spectral_norm(const SeparableKernel& k) {
  const auto N = static_cast<Eigen::Index>(k.size());
  Eigen::MatrixXd M(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) {
      M(i, j) = k.entry(static_cast<std::size_t>(i + 1), static_cast<std::size_t>(j + 1));
    }
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

RegionOptions region(RegionMode mode, double p, double lo, double hi, double step,
                     std::size_t N = 2000) {
  RegionOptions o;
  o.mode = mode;
  o.p_range = Range{p, p, 1.0};
  o.second_range = Range{lo, hi, step};
  o.N = N;
  return o;
}

}  // namespace

TEST_SUITE("sharpness") {

TEST_CASE("parallel_map keeps index order and rethrows") {
  const auto v = parallel_map(100, 7, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 100; ++i) CHECK(v[i] == i * i);
  CHECK_THROWS_AS((void)parallel_map(10, 3,
                                     [](std::size_t i) -> int {
                                       if (i == 4) throw std::runtime_error("boom");
                                       return 0;
                                     }),
                  std::runtime_error);
}

TEST_CASE("C1 scan at eps = 1 approaches 17 pi^2 / 60") {
  RatioScanOptions o;
  o.N = 100000;
  const auto scan = ratio_scan(Family::C1, make(2, 2), {1.0}, o);
  REQUIRE(scan.entries.size() == 1);
  const auto& e = scan.entries[0];
  const double closed = 17.0 * std::numbers::pi * std::numbers::pi / 60.0;
  CHECK(e.conclusive);
  CHECK(std::abs(e.ratio - closed) <= std::max(e.budget, 1e-4));
  CHECK(e.finite_ratio < e.ratio);
  CHECK(scan.target == 4.0);
  CHECK(e.normalized_ratio == doctest::Approx(e.ratio / 4.0));
}

TEST_CASE("C1 scan is increasing in 1/eps and below the constant") {
  RatioScanOptions o;
  o.N = 100000;
  o.jobs = 3;
  const auto scan = ratio_scan(Family::C1, make(2, 2), {0.5, 0.2, 0.1}, o);
  CHECK(scan.monotone);
  CHECK(scan.below_target);
  for (std::size_t i = 1; i < scan.entries.size(); ++i) {
    CHECK(scan.entries[i].ratio > scan.entries[i - 1].ratio);
  }
}

TEST_CASE("degenerate scan entry with a unit test sequence") {
  RatioScanOptions o;
  o.N = 10;
  o.x_override = seq::Unit{1};
  const auto scan = ratio_scan(Family::C2, make(2, 0), {1.0}, o);
  CHECK(scan.entries[0].ratio == 1.0);
  CHECK(scan.entries[0].normalized_ratio == 0.25);
}

TEST_CASE("BGA scan stays below its constant") {
  RatioScanOptions o;
  o.N = 100000;
  const auto scan = ratio_scan(Family::BGA, make(2, 0, 1.0), {1.0, 0.5}, o);
  CHECK(scan.target == 9.0);
  CHECK(scan.below_target);
  CHECK(scan.monotone);
}

TEST_CASE("ratio scan argument errors") {
  CHECK_THROWS_AS((void)ratio_scan(Family::C1, make(2, 2), {}), std::invalid_argument);
  CHECK_THROWS_AS((void)ratio_scan(Family::C1, make(2, 2), {0.1, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS((void)ratio_scan(Family::C1, make(2, 2), {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS((void)ratio_scan(Family::C1, make(2, 2), {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)ratio_scan(Family::L1, make(2, 0), {1.0}), std::invalid_argument);
}

TEST_CASE("norm of the Hardy transpose, small sizes") {
  const Params P = make(2, 0);
  CHECK(norm_estimate(DualForm::C2Dual, P, make_weights(seq::Const{1}, 1)).value ==
        doctest::Approx(1.0).epsilon(1e-13));
  const double two = norm_estimate(DualForm::C2Dual, P, make_weights(seq::Const{1}, 2)).value;
  CHECK(std::abs(two - std::sqrt((1.5 + std::sqrt(1.25)) / 2.0)) < 1e-9);
  CHECK(std::abs(two - 1.144123) < 1e-6);
}

TEST_CASE("p = 2 estimates match a dense SVD") {
  for (std::size_t N : {3u, 8u, 17u, 40u, 64u}) {
    for (const Params& P : {make(2, 0), make(2, -0.3), make(2, 0.6)}) {
      const Weights w = make_weights(seq::Const{1}, N);
      const auto est = norm_estimate(DualForm::C2Dual, P, w);
      CHECK(est.converged);
      CHECK(std::abs(est.value - dense_spectral_norm(c2_recast_kernel(P, w))) < 1e-6);
    }
    const Params Q = make(2, 0, 0.7);
    const Weights g = make_weights(seq::Pow{-2.0}, N);
    const auto bga = norm_estimate(DualForm::BgaDual, Q, g);
    CHECK(std::abs(bga.value - dense_spectral_norm(bga_dual_kernel(Q, g))) < 1e-6);
  }
}

TEST_CASE("estimates grow with N and stay under the constant") {
  for (double p : {1.5, 2.0, 3.0}) {
    const Params P = make(p, 0);
    double last = 0.0;
    for (std::size_t N : {2u, 10u, 100u, 1000u}) {
      const auto est = norm_estimate(DualForm::C2Dual, P, make_weights(seq::Const{1}, N));
      CHECK(est.converged);
      CHECK(est.value >= last);
      CHECK(est.value < est.bound);
      last = est.value;
    }
  }
  CHECK_THROWS_AS((void)norm_estimate(DualForm::C2Dual, make(1, 0), make_weights(seq::Const{1}, 3)),
                  std::invalid_argument);
}

TEST_CASE("non-convergence is reported") {
  const auto est = norm_estimate(DualForm::C2Dual, make(2, 0), make_weights(seq::Const{1}, 500),
                                 1e-15, 3);
  CHECK_FALSE(est.converged);
  CHECK(est.iterations == 3);
  CHECK(est.last_gap > 0.0);
}

TEST_CASE("region cells around c0(2) and the BG threshold") {
  const auto pc = region_map(region(RegionMode::PC, 2, -0.3, -0.2, 0.1));
  REQUIRE(pc.cells.size() == 2);
  CHECK(pc.cells[0].cls == CellClass::CertFailNoCounterexample);
  CHECK(pc.cells[1].cls == CellClass::Sufficient);
  REQUIRE(pc.overlay.size() == 1);
  CHECK(pc.overlay[0].value == doctest::Approx(2.0 - std::sqrt(5.0)));

  const auto pa = region_map(region(RegionMode::PA, 2, 0.5, 0.8, 0.3));
  REQUIRE(pa.cells.size() == 2);
  CHECK(pa.cells[0].cert_verdict == "CERT_FAIL");
  CHECK(pa.cells[0].battery_verdict == Verdict::Holds);
  CHECK(pa.cells[1].cls == CellClass::Sufficient);
  CHECK(pa.overlay[0].value == 0.75);

  auto bga = region(RegionMode::PA, 2, 0.25, 2.0, 0.25);
  bga.family = Family::BGA;
  for (const auto& cell : region_map(bga).cells) CHECK(cell.battery_verdict == Verdict::Holds);
}

TEST_CASE("cells above c0 are sufficient") {
  for (double p : {1.1, 1.5, 3.0, 6.0, 10.0}) {
    const double c0 = solve_c0(p).c0;
    const auto m = region_map(region(RegionMode::PC, p, c0 + 1e-6, 0.9, (0.9 - c0) / 3.0, 1500));
    for (const auto& cell : m.cells) {
      INFO("p=", p, " c=", cell.second);
      CHECK(cell.cls == CellClass::Sufficient);
    }
  }
}

TEST_CASE("reverse cells for p < 1") {
  const auto m = region_map(region(RegionMode::PC, 0.5, 0.0, 0.1, 0.1));
  for (const auto& cell : m.cells) {
    CHECK(cell.battery_verdict == Verdict::Holds);
    CHECK(cell.cls == CellClass::HoldsOnBattery);
  }
}

TEST_CASE("region output does not depend on jobs") {
  auto o = region(RegionMode::PC, 2, -0.5, 0.5, 0.25, 1000);
  o.p_range = Range{1.5, 3.0, 0.5};
  o.jobs = 1;
  const auto a = region_map(o);
  o.jobs = 6;
  const auto b = region_map(o);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].min_margin == b.cells[i].min_margin);
    CHECK(a.cells[i].cls == b.cells[i].cls);
  }
}

TEST_CASE("range parsing") {
  const auto r = parse_range("1:2:0.25").values();
  CHECK(r.size() == 5);
  CHECK(r.back() == 2.0);
  CHECK(parse_range("2:2:1").values().size() == 1);
  CHECK_THROWS_AS((void)parse_range("1:2"), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_range("2:1:0.5"), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_range("1:2:0"), std::invalid_argument);
}

TEST_CASE("search: single supports for C2 peak at m = 1") {
  SearchOptions o;
  o.N = 1000;
  const auto r = counterexample_search(Family::C2, make(2, 0), 1, 0, o);
  CHECK(r.single_support_best == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r.single_support_position == 1);
}

TEST_CASE("search stays below 1 where the inequality is known to hold") {
  SearchOptions o;
  o.N = 2000;
  const auto hardy = counterexample_search(Family::C1, make(2, 2), 10000, 7, o);
  CHECK(hardy.best_ratio < 1.0);
  CHECK_FALSE(hardy.claimed);
  const auto bg = counterexample_search(Family::BG, make(2, 0, 0.9), 10000, 0, o);
  CHECK(bg.best_ratio <= 1.0 + o.tolerance);
}

TEST_CASE("search is deterministic across jobs") {
  SearchOptions o;
  o.N = 500;
  o.jobs = 1;
  const auto a = counterexample_search(Family::C2, make(2, -0.5), 5000, 42, o);
  o.jobs = 8;
  const auto b = counterexample_search(Family::C2, make(2, -0.5), 5000, 42, o);
  CHECK(a.best_ratio == b.best_ratio);
  CHECK(a.positions == b.positions);
  CHECK(a.values == b.values);
  CHECK(a.evaluations == b.evaluations);
  const auto c = counterexample_search(Family::C2, make(2, -0.5), 5000, 43, o);
  CHECK(c.values != a.values);
}

TEST_CASE("search rejects bad input") {
  CHECK_THROWS_AS((void)counterexample_search(Family::C2, make(2, 0), 0, 0), std::invalid_argument);
  SearchOptions o;
  o.N = 10;
  CHECK_THROWS_AS((void)counterexample_search(Family::L1, make(2, 0), 10, 0, o),
                  std::invalid_argument);
}

}  // TEST_SUITE
