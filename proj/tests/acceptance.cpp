// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance        run all twelve, exit 1 if any fails
//   acceptance K      run criterion K only
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "copson/aux_weights.hpp"
#include "copson/cli.hpp"
#include "copson/evaluator.hpp"
#include "copson/scalar_core.hpp"
#include "copson/sequences.hpp"
#include "copson/sharpness.hpp"

using namespace copson;

namespace {

// tolerances, pinned here
constexpr double kC0Tol = 1e-12;
constexpr double kCond26Tol = 1e-10;
constexpr double kLemmaTol = 1e-12;
constexpr double kResidualTol = 1e-12;
constexpr double kSharpLiteral = 2.20;
constexpr double kSharpLiteralTol = 0.01;
constexpr double kSharpClosedTol = 1e-3;
constexpr double kNormTol = 1e-6;
constexpr double kMasterTol = 1e-10;
constexpr double kBaselTol = 1e-13;

struct Result {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Params make(double p, double c, std::optional<double> alpha = std::nullopt, bool reverse = false) {
  Params P;
  P.p = p;
  P.c = c;
  P.alpha = alpha;
  P.reverse = reverse;
  return P;
}

Weights weights_for(const SequenceSpec& s, std::size_t N) {
  return make_weights(s, representable_length(s, N));
}

const std::vector<SequenceSpec>& all_lambdas() {
  static const std::vector<SequenceSpec> v{seq::Const{1}, seq::Geom{0.5, 1.0}, seq::Pow{-2.0}};
  return v;
}
const std::vector<SequenceSpec>& summable_lambdas() {
  static const std::vector<SequenceSpec> v{seq::Geom{0.5, 1.0}, seq::Pow{-2.0}};
  return v;
}
const std::vector<SequenceSpec>& xs() {
  static const std::vector<SequenceSpec> v{seq::Unit{1}, seq::Unit{3}, seq::Pow{-2.0},
                                           seq::Geom{1.0 / 3.0, 1.0}};
  return v;
}

// every battery x holds for (family, params, lambda)
void battery_holds(Result& r, Family f, const Params& P, const SequenceSpec& lam, std::size_t N) {
  const Weights w = weights_for(lam, N);
  for (const auto& x : xs()) {
    const auto rep = eval_inequality(f, P, w, materialize(x, w.size()));
    r.check(rep.verdict == Verdict::Holds,
            std::string(to_string(f)) + " p=" + num(P.p) + " c=" + num(P.c) +
                (P.alpha ? " alpha=" + num(*P.alpha) : "") + " lam=" + to_string(lam) +
                " x=" + to_string(x) + " -> " + std::string(to_string(rep.verdict)));
  }
}

void cert_passes(Result& r, WeightScheme s, const Params& P, const SequenceSpec& lam,
                 std::size_t N) {
  const auto cert = certify(s, P, weights_for(lam, N));
  r.check(cert.pass, std::string(to_string(s)) + " p=" + num(P.p) + " c=" + num(P.c) +
                         (P.alpha ? " alpha=" + num(*P.alpha) : "") + " lam=" + to_string(lam) +
                         " min_residual=" + num(cert.min_residual) + " at " +
                         std::to_string(cert.argmin_index));
}

Result c1() {
  Result r;
  const double a = solve_c0(2.0).c0, b = solve_c0(0.5).c0;
  r.check(std::abs(a - (2.0 - std::sqrt(5.0))) < kC0Tol, "c0(2)=" + num(a));
  r.check(std::abs(b - (3.0 - std::sqrt(5.0)) / 4.0) < kC0Tol, "c0(1/2)=" + num(b));
  r.detail = r.pass ? "c0(2)=" + num(a) + " c0(1/2)=" + num(b) : r.detail;
  return r;
}

Result c2() {
  Result r;
  double worst = 0.0;
  for (double p : {1.1, 1.5, 2.0, 3.0, 5.0, 10.0}) {
    const double v = std::abs(cond_26(p, solve_c0(p).c0));
    worst = std::max(worst, v);
    r.check(v < kCond26Tol, "p=" + num(p) + " |cond|=" + num(v));
  }
  if (r.pass) r.detail = "max |cond_26| = " + num(worst);
  return r;
}

Result c3() {
  Result r;
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> up(1.0, 10.0), uc(-5.0, 0.0);
  int bad = 0, fails = 0;
  for (int i = 0; i < 50; ++i) {
    double p = up(rng);
    if (p == 1.0) p = 10.0;  // (1, 10]
    double c = uc(rng);
    const Params P = make(p, c);
    const bool grid = check_condition(Condition::Lemma21, P, 4096, kLemmaTol).pass;
    const bool endpoint = scalar_eval(ScalarFn::FLemma, P, 1.0) >= -kLemmaTol;
    if (!grid) ++fails;
    if (grid != endpoint) {
      ++bad;
      r.check(false, "p=" + num(p) + " c=" + num(c));
    }
  }
  if (r.pass) r.detail = "0 disagreements (" + std::to_string(fails) + "/50 FAIL)";
  return r;
}

Result c4() {
  Result r;
  for (double p : {1.5, 2.0, 3.0}) {
    const double c0 = solve_c0(p).c0;
    for (double c : {c0, c0 / 2.0, 0.0}) {
      const Params P = make(p, c);
      for (const auto& lam : all_lambdas()) {
        cert_passes(r, WeightScheme::CopsonTail, P, lam, 10000);
        battery_holds(r, Family::C2, P, lam, 10000);
      }
      for (const auto& lam : summable_lambdas()) {
        cert_passes(r, WeightScheme::Leindler, P, lam, 10000);
        battery_holds(r, Family::L1, P, lam, 10000);
      }
    }
  }
  if (r.pass) r.detail = "27 C2 and 18 L1 certificates pass, battery HOLDS";
  return r;
}

Result c5() {
  Result r;
  for (double c : {0.0, 0.1}) {
    for (const auto& lam : all_lambdas()) {
      battery_holds(r, Family::C2, make(0.5, c, std::nullopt, true), lam, 10000);
    }
  }
  if (r.pass) r.detail = "reversed C2 HOLDS at p=1/2, c in {0, 0.1}";
  return r;
}

Result c6() {
  Result r;
  for (const auto& [p, alpha] : {std::pair{2.0, 0.75}, std::pair{2.0, 0.8}, std::pair{3.0, 0.9}}) {
    for (const SequenceSpec& lam : {SequenceSpec{seq::Const{1}}, SequenceSpec{seq::Pow{-2.0}}}) {
      cert_passes(r, WeightScheme::Bg, make(p, 0, alpha), lam, 10000);
    }
  }
  const auto low = certify(WeightScheme::Bg, make(2, 0, 0.5), weights_for(seq::Const{1}, 100));
  const double r1 = low.residuals.at(0);
  r.check(std::abs(r1 - (2.0 * 0.25 - 1.0)) < kResidualTol, "residual at n=1 is " + num(r1));
  r.check(!low.pass, "alpha=0.5 certificate unexpectedly passes");
  if (r.pass) r.detail = "6 certificates pass; r_1(2, 0.5) = " + num(r1);
  return r;
}

Result c7() {
  Result r;
  for (double p : {1.5, 2.0}) {
    for (double alpha : {0.25, 0.5, 1.0, 2.0}) {
      const Params P = make(p, 0, alpha);
      for (const auto& lam : summable_lambdas()) {
        battery_holds(r, Family::BGA, P, lam, 10000);
        if (alpha >= 1.0) cert_passes(r, WeightScheme::Bga, P, lam, 10000);
      }
    }
  }
  if (r.pass) r.detail = "BGA HOLDS on 16 cases, 8 certificates pass";
  return r;
}

Result c8() {
  Result r;
  RatioScanOptions o;
  o.N = 1000000;
  o.jobs = 4;
  const Params P = make(2, 2);
  const auto scan = ratio_scan(Family::C1, P, {0.5, 0.2, 0.1, 0.05}, o);
  std::string ratios;
  for (const auto& e : scan.entries) {
    ratios += " R(" + num(e.eps) + ")=" + num(e.ratio);
    r.check(e.conclusive, "eps=" + num(e.eps) + " inconclusive");
    r.check(e.ratio < 4.0, "eps=" + num(e.eps) + " ratio >= 4");
  }
  r.check(scan.monotone, "not strictly increasing:" + ratios);

  const auto one = ratio_scan(Family::C1, P, {1.0}, o).entries.at(0);
  const double closed = 17.0 * std::numbers::pi * std::numbers::pi / 60.0;
  const bool closed_ok = std::abs(one.ratio - closed) < kSharpClosedTol;
  r.check(closed_ok, "R(1)=" + num(one.ratio) + " vs 17pi^2/60=" + num(closed));
  const bool literal_ok = std::abs(one.ratio - kSharpLiteral) <= kSharpLiteralTol;
  r.check(literal_ok, "literal target R(1)=2.20+-0.01 not met: R(1)=" + num(one.ratio) +
                          " (closed form 17pi^2/60=" + num(closed) + ")");
  if (r.pass) r.detail = ratios.substr(1) + " R(1)=" + num(one.ratio);
  else r.detail += " |" + ratios;
  return r;
}

Result c9() {
  Result r;
  const Params P = make(2, 0);
  const double two = norm_estimate(DualForm::C2Dual, P, make_weights(seq::Const{1}, 2)).value;
  r.check(std::abs(two - 1.144123) <= kNormTol, "N=2 estimate " + num(two));
  double last = 0.0;
  std::string trail;
  for (std::size_t N : {2u, 10u, 100u}) {
    const auto est = norm_estimate(DualForm::C2Dual, P, make_weights(seq::Const{1}, N));
    trail += " " + num(est.value);
    r.check(est.converged, "N=" + std::to_string(N) + " did not converge");
    r.check(est.value >= last, "not monotone at N=" + std::to_string(N));
    r.check(est.value < 2.0, "N=" + std::to_string(N) + " estimate >= 2");
    last = est.value;
  }
  if (r.pass) r.detail = "estimates N=2,10,100:" + trail;
  return r;
}

Result c10() {
  Result r;
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(0.05, 2.0), up(1.1, 4.0);
    MasterCheckInput in;
    in.p = up(rng);
    for (auto* v : {&in.a, &in.b, &in.w, &in.x}) {
      v->resize(20);
      for (double& e : *v) e = pos(rng);
    }
    const auto rep = verify_master(MasterForm::M22, in, kMasterTol);
    worst = std::min(worst, rep.residual);
    r.check(rep.residual >= -kMasterTol, "seed " + std::to_string(seed) + " residual " +
                                             num(rep.residual));
  }
  if (r.pass) r.detail = "min residual over 100 seeds " + num(worst);
  return r;
}

Result c11() {
  Result r;
  const auto run = [](Family f, const Params& P, const SequenceSpec& x, std::size_t N) {
    return eval_inequality(f, P, make_weights(seq::Const{1}, N), materialize(x, N));
  };
  const auto a = run(Family::C2, make(2, 0), seq::Unit{1}, 10);
  r.check(a.lhs == 1.0 && a.constant == 4.0 && a.rhs_sum == 1.0 && a.ratio == 0.25 &&
              a.verdict == Verdict::Holds,
          "C2 single support");

  const auto b = run(Family::C1, make(2, 2), seq::Unit{1}, 1000);
  double direct = 0.0;
  for (int n = 1000; n >= 1; --n) direct += 1.0 / (static_cast<double>(n) * n);
  const double missing = std::numbers::pi * std::numbers::pi / 6.0 - b.lhs;
  r.check(std::abs(b.lhs - direct) < kBaselTol, "Basel partial sum " + num(b.lhs));
  r.check(missing >= 1.0 / 1001.0 && missing <= 1.0 / 1000.0, "Basel tail " + num(missing));
  r.check(b.rhs == 4.0 && b.verdict == Verdict::Holds, "C1 rhs/verdict");

  const auto c = run(Family::BG, make(2, 0, 1.0), seq::Unit{1}, 10);
  r.check(c.lhs == 1.0 && c.constant == 9.0 && c.rhs_sum == 1.0 &&
              std::abs(c.ratio - 1.0 / 9.0) < 1e-15 && c.verdict == Verdict::Holds,
          "BG single support");

  const auto d = run(Family::C2, make(0.5, 0, std::nullopt, true), seq::Unit{1}, 10);
  r.check(d.lhs == 1.0 && std::abs(d.rhs - std::sqrt(0.5)) < 1e-15 && d.margin > 0.0 &&
              d.verdict == Verdict::Holds,
          "reversed C2 single support");
  if (r.pass) r.detail = "4 examples reproduced; Basel lhs=" + num(b.lhs);
  return r;
}

std::string cli_output(std::vector<std::string> args, int& code) {
  std::ostringstream out, err;
  code = cli::run(args, out, err);
  return out.str();
}

Result c12() {
  Result r;
  const std::vector<std::vector<std::string>> commands{
      {"region", "--mode", "pc", "--p-range", "1.5:3:0.5", "--second-range", "-0.6:0.4:0.2",
       "--N", "2000"},
      {"region", "--mode", "pa", "--p-range", "1.5:3:0.5", "--second-range", "0.25:1:0.25",
       "--N", "2000", "--format", "json"},
      {"search", "--family", "C2", "--p", "2", "--c", "-0.5", "--N", "1000", "--budget",
       "10000", "--seed", "7"},
      {"search", "--family", "BG", "--p", "2", "--alpha", "0.6", "--N", "1000", "--budget",
       "10000", "--seed", "11"},
  };
  for (const auto& base : commands) {
    auto one = base, eight = base;
    one.insert(one.end(), {"--jobs", "1"});
    eight.insert(eight.end(), {"--jobs", "8"});
    int c1 = 0, c8 = 0;
    const std::string a = cli_output(one, c1), b = cli_output(eight, c8);
    r.check(!a.empty() && a == b && c1 == c8, base[0] + " " + base[2] + " differs across jobs");
    r.check(c1 != cli::kUsage && c1 != cli::kNumericFailure,
            base[0] + " exited " + std::to_string(c1));
  }
  if (r.pass) r.detail = "4 commands byte-identical at --jobs 1 and 8";
  return r;
}

const std::vector<std::pair<const char*, std::function<Result()>>> kCriteria{
    {"c0 closed forms", c1},
    {"c0 definition consistency", c2},
    {"lemma endpoint principle", c3},
    {"C2/L1 certificates and battery", c4},
    {"reverse case p = 1/2", c5},
    {"BG certificate chain", c6},
    {"BGA battery and certificates", c7},
    {"sharpness scan C1", c8},
    {"norm oracle", c9},
    {"M22 random property", c10},
    {"evaluator micro-oracles", c11},
    {"determinism across jobs", c12},
};

}  // namespace

int main(int argc, char** argv) {
  std::size_t only = 0;
  if (argc > 1) {
    only = std::strtoul(argv[1], nullptr, 10);
    if (only < 1 || only > kCriteria.size()) {
      std::cerr << "usage: acceptance [1-12]\n";
      return 64;
    }
  }
  int failed = 0;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    if (only != 0 && only != i + 1) continue;
    Result res;
    try {
      res = kCriteria[i].second();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    if (!res.pass) ++failed;
    std::cout << (res.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << "  "
              << kCriteria[i].first << "  | " << res.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
