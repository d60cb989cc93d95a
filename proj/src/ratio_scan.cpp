#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "copson/numeric.hpp"
#include "copson/parallel.hpp"
#include "copson/sharpness.hpp"

namespace copson {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sum of terms[M..inf) estimated from the first M terms: the local power-law
// slope from t_{M/2} to t_M is continued as an integral from M + 1/2.
double extrapolated_sum(const std::vector<double>& terms, std::size_t M) {
  CompensatedSum s;
  for (std::size_t i = 0; i < M; ++i) s += terms[i];
  const double tM = terms[M - 1];
  if (tM == 0.0) return s.value();
  const double tH = terms[M / 2 - 1];
  if (!(tH > 0.0)) return kInf;
  const double slope = std::log(tM / tH) / std::log(static_cast<double>(M) / static_cast<double>(M / 2));
  if (!(slope < -1.0)) return kInf;
  const double m = static_cast<double>(M);
  const double tail = tM * m / (-slope - 1.0) * std::pow(1.0 + 0.5 / m, slope + 1.0);
  return s.value() + tail;
}

double estimate(const std::vector<double>& lt, const std::vector<double>& rt, std::size_t M) {
  return extrapolated_sum(lt, M) / extrapolated_sum(rt, M);
}

struct Setup {
  SequenceSpec lambda;
  SequenceSpec x;
};

Setup extremal_setup(Family family, const Params& params, double eps,
                     const RatioScanOptions& options) {
  Setup s;
  if (family == Family::BGA) {
    seq::ExtremalBga ex{options.decay, params.alpha_or_throw(), params.p, eps};
    s.lambda = paired_weights(ex);
    s.x = ex;
  } else {
    s.lambda = seq::Const{1.0};
    s.x = seq::ExtremalCopson{params.p, params.c, eps};
  }
  if (options.x_override) s.x = *options.x_override;
  return s;
}

RatioEntry scan_one(Family family, const Params& params, double eps, double target,
                    const RatioScanOptions& options) {
  const std::size_t N = options.N;
  const Setup setup = extremal_setup(family, params, eps, options);
  validate(setup.x);
  const Weights lambda = make_weights(setup.lambda, N);
  const std::vector<double> x = materialize(setup.x, N);

  std::vector<double> lt;
  std::vector<double> rt;
  SideOptions mid;
  mid.lhs_terms = &lt;
  mid.rhs_terms = &rt;

  // C2's inner sums run over k >= n, so the test sequence's own tail enters
  // every term; it is known only as an interval.
  std::optional<Interval> inner;
  if (family == Family::C2) {
    if (!summable(setup.x)) {
      throw std::invalid_argument("C2 scan needs a summable test sequence (eps too small for c)");
    }
    inner = tail_bound(setup.x, N);
    mid.inner_tail = inner->midpoint();
  }
  const SideSums sums = evaluate_sides(family, params, lambda, x, mid);

  RatioEntry e;
  e.eps = eps;
  e.N = N;
  e.finite_ratio = sums.lhs / sums.rhs_sum;
  e.ratio = estimate(lt, rt, N);
  e.normalized_ratio = e.ratio / target;

  double spread = 0.0;
  auto widen = [&](const SideOptions& alt) {
    std::vector<double> la;
    std::vector<double> ra;
    SideOptions o = alt;
    o.lhs_terms = &la;
    o.rhs_terms = &ra;
    (void)evaluate_sides(family, params, lambda, x, o);
    spread = std::max(spread, std::abs(estimate(la, ra, N) - e.ratio));
  };
  if (inner && !inner->degenerate()) {
    for (double end : {inner->lo, inner->hi}) {
      SideOptions o;
      o.inner_tail = end;
      widen(o);
    }
  }
  if (uses_tail_sums(family) && !lambda.tail_beyond()->degenerate()) {
    for (double end : {lambda.tail_beyond()->lo, lambda.tail_beyond()->hi}) {
      SideOptions o;
      o.beyond_tail = end;
      widen(o);
    }
  }
  const double extrapolation = N >= 4 ? std::abs(e.ratio - estimate(lt, rt, N / 2)) : kInf;
  e.budget = extrapolation + spread;
  e.conclusive = std::isfinite(e.ratio) && e.budget < 0.01 * e.ratio;
  return e;
}

}  // namespace

RatioScan ratio_scan(Family family, const Params& params, const std::vector<double>& eps_list,
                     const RatioScanOptions& options) {
  if (family != Family::C1 && family != Family::C2 && family != Family::BGA) {
    throw std::invalid_argument("ratio scans cover C1, C2 and BGA only");
  }
  validate(family, params);
  if (eps_list.empty()) throw std::invalid_argument("eps list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw std::invalid_argument("eps values must be > 0");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("eps list must be strictly decreasing");
    }
  }
  if (options.N < 4) throw std::invalid_argument("ratio scans need N >= 4");
  if (family == Family::BGA && !(options.decay > 1.0)) {
    throw std::invalid_argument("BGA scans need weight decay a > 1");
  }

  RatioScan scan;
  scan.family = family;
  scan.params = params;
  scan.target = family_constant(family, params);
  const Setup first = extremal_setup(family, params, eps_list.front(), options);
  scan.lambda_spec = to_string(first.lambda);
  scan.x_spec = to_string(first.x);

  scan.entries = parallel_map(eps_list.size(), options.jobs, [&](std::size_t i) {
    return scan_one(family, params, eps_list[i], scan.target, options);
  });

  scan.monotone = true;
  scan.below_target = true;
  for (std::size_t i = 0; i < scan.entries.size(); ++i) {
    const auto& e = scan.entries[i];
    if (!(e.ratio < scan.target)) scan.below_target = false;
    if (i > 0 && !(e.ratio > scan.entries[i - 1].ratio)) scan.monotone = false;
  }
  return scan;
}

}  // namespace copson
