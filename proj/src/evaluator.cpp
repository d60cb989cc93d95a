#include "copson/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "copson/numeric.hpp"

namespace copson {

double Params::alpha_or_throw() const {
  if (!alpha || !std::isfinite(*alpha)) throw std::invalid_argument("alpha is required");
  return *alpha;
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::C1: return "C1";
    case Family::C2: return "C2";
    case Family::L1: return "L1";
    case Family::L2: return "L2";
    case Family::BG: return "BG";
    case Family::BGA: return "BGA";
    case Family::I34: return "I34";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "HOLDS";
    case Verdict::Fails: return "FAILS";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  for (Family f : {Family::C1, Family::C2, Family::L1, Family::L2, Family::BG, Family::BGA,
                   Family::I34}) {
    if (text == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown family '" + std::string(text) + "'");
}

bool uses_tail_sums(Family f) {
  return f == Family::L1 || f == Family::L2 || f == Family::BGA || f == Family::I34;
}

bool uses_alpha(Family f) { return f == Family::BG || f == Family::BGA || f == Family::I34; }

void validate(Family f, const Params& params) {
  if (!(params.p > 0.0) || !std::isfinite(params.p)) throw std::invalid_argument("p must be > 0");
  if (uses_alpha(f)) {
    const double a = params.alpha_or_throw();
    if (f == Family::I34 && !(a > 0.0)) throw std::invalid_argument("I34 needs alpha > 0");
    if (!(a * params.p + 1.0 > 0.0))
      throw std::invalid_argument("alpha p + 1 must be > 0 for the (alpha p + 1)^p constant");
  } else {
    if (!std::isfinite(params.c)) throw std::invalid_argument("c must be finite");
    if (params.c == 1.0) throw std::invalid_argument("c = 1 is the logarithmic limit case");
  }
}

double family_constant(Family f, const Params& params) {
  validate(f, params);
  const double p = params.p;
  switch (f) {
    case Family::C1:
    case Family::L2:
    case Family::C2:
    case Family::L1: return std::pow(p / std::abs(params.c - 1.0), p);
    case Family::BG:
    case Family::BGA: return std::pow(*params.alpha * p + 1.0, p);
    case Family::I34: return std::pow(*params.alpha * p, p);
  }
  return 0.0;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bound on sum_{n>N} lam_n Lam_n^{-c}.
double prefix_weight_tail(const Weights& w, double c) {
  const double last = w.prefix(w.size());
  if (w.summable()) {
    const double hi = w.tail_beyond()->hi;
    if (hi == 0.0) return 0.0;
    return hi * std::max(pow_nonneg(last, -c), pow_nonneg(last + hi, -c));
  }
  if (c > 1.0) return pow_nonneg(last, 1.0 - c) / (c - 1.0);
  return kInf;
}

// Bound on sum_{n>N} lam_n Lam*_n^{e}; lam_n = Lam*_n - Lam*_{n+1} turns the
// sum into a Riemann sum for int_0^{Lam*_{N+1}} t^e dt.
double tail_weight_tail(const Weights& w, double e) {
  const double hi = w.tail_beyond()->hi;
  if (hi == 0.0) return 0.0;
  if (e >= 0.0) return pow_nonneg(hi, 1.0 + e);
  if (e > -1.0) return pow_nonneg(hi, 1.0 + e) / (1.0 + e);
  return kInf;
}

double frozen(double inner, double p, double weight_tail) {
  if (inner == 0.0 || weight_tail == 0.0) return 0.0;
  return pow_nonneg(inner, p) * weight_tail;
}

}  // namespace

SideSums evaluate_sides(Family family, const Params& params, const Weights& lambda,
                        std::span<const double> x, const SideOptions& options) {
  validate(family, params);
  const std::size_t N = lambda.size();
  if (x.size() != N) {
    throw std::invalid_argument("length mismatch: " + std::to_string(x.size()) +
                                " test terms for " + std::to_string(N) + " weights");
  }
  if (uses_tail_sums(family) && !lambda.summable()) {
    throw std::invalid_argument(std::string(to_string(family)) +
                                " needs summable weights (tail sums are undefined)");
  }
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("test sequence must be >= 0");
  }

  const double p = params.p;
  const double c = params.c;
  const double alpha = uses_alpha(family) ? *params.alpha : 0.0;
  const double beyond =
      lambda.summable() ? options.beyond_tail.value_or(lambda.tail_beyond()->midpoint()) : 0.0;
  auto star = [&](std::size_t n) { return lambda.tail_with(n, beyond); };

  if (options.lhs_terms) options.lhs_terms->assign(N, 0.0);
  if (options.rhs_terms) options.rhs_terms->assign(N, 0.0);
  CompensatedSum lhs;
  CompensatedSum rhs;
  auto record = [&](std::size_t n, double lt, double rt) {
    lhs += lt;
    rhs += rt;
    if (options.lhs_terms) (*options.lhs_terms)[n - 1] = lt;
    if (options.rhs_terms) (*options.rhs_terms)[n - 1] = rt;
  };

  SideSums out;
  switch (family) {
    case Family::C1: {
      CompensatedSum inner;
      for (std::size_t n = 1; n <= N; ++n) {
        const double lam = lambda.lambda(n);
        const double big = lambda.prefix(n);
        inner += lam * x[n - 1];
        record(n, power_product({{lam, 1.0}, {big, -c}, {inner.value(), p}}),
               power_product({{lam, 1.0}, {big, p - c}, {x[n - 1], p}}));
      }
      out.lhs_outer_tail_hi = frozen(inner.value(), p, prefix_weight_tail(lambda, c));
      break;
    }
    case Family::L1: {
      CompensatedSum inner;
      for (std::size_t n = 1; n <= N; ++n) {
        const double lam = lambda.lambda(n);
        const double st = star(n);
        inner += lam * x[n - 1];
        record(n, power_product({{lam, 1.0}, {st, -c}, {inner.value(), p}}),
               power_product({{lam, 1.0}, {st, p - c}, {x[n - 1], p}}));
      }
      out.lhs_outer_tail_hi = frozen(inner.value(), p, tail_weight_tail(lambda, -c));
      break;
    }
    case Family::C2:
    case Family::L2: {
      const bool tail = family == Family::L2;
      CompensatedSum inner;
      for (std::size_t n = N; n >= 1; --n) {
        const double lam = lambda.lambda(n);
        const double base = tail ? star(n) : lambda.prefix(n);
        inner += lam * x[n - 1];
        record(n, power_product({{lam, 1.0}, {base, -c}, {inner.value() + options.inner_tail, p}}),
               power_product({{lam, 1.0}, {base, p - c}, {x[n - 1], p}}));
      }
      break;
    }
    case Family::BG: {
      CompensatedSum inner;
      CompensatedSum plain;
      for (std::size_t n = N; n >= 1; --n) {
        const double lam = lambda.lambda(n);
        const double big = lambda.prefix(n);
        inner += pow_nonneg(big, alpha) * x[n - 1];
        plain += x[n - 1];
        record(n, power_product({{lam, 1.0}, {inner.value(), p}}),
               power_product({{lam, 1.0}, {big, alpha * p}, {plain.value(), p}}));
      }
      break;
    }
    case Family::BGA: {
      CompensatedSum inner;
      CompensatedSum plain;
      for (std::size_t n = 1; n <= N; ++n) {
        const double lam = lambda.lambda(n);
        const double st = star(n);
        inner += pow_nonneg(st, alpha) * x[n - 1];
        plain += x[n - 1];
        record(n, power_product({{lam, 1.0}, {inner.value(), p}}),
               power_product({{lam, 1.0}, {st, alpha * p}, {plain.value(), p}}));
      }
      const double hi = lambda.tail_beyond()->hi;
      out.lhs_outer_tail_hi = frozen(inner.value(), p, hi);
      out.rhs_outer_tail_hi = frozen(plain.value(), p, tail_weight_tail(lambda, alpha * p));
      break;
    }
    case Family::I34: {
      if (params.i34_direction == I34Direction::Tail) {
        CompensatedSum inner;
        for (std::size_t n = 1; n <= N; ++n) {
          const double lam = lambda.lambda(n);
          const double st = star(n);
          // Lam*_n - Lam*_{n+1} = lam_n, so the difference of powers is
          // Lam*_n^a (1 - (1 - lam_n/Lam*_n)^a)
          const double diff = pow_nonneg(st, alpha) * one_minus_pow_complement(lam / st, alpha);
          inner += diff * x[n - 1];
          record(n, power_product({{lam, 1.0}, {inner.value(), p}}),
                 power_product({{lam, 1.0}, {st, alpha * p}, {x[n - 1], p}}));
        }
        out.lhs_outer_tail_hi = frozen(inner.value(), p, lambda.tail_beyond()->hi);
      } else {
        CompensatedSum inner;
        for (std::size_t n = N; n >= 1; --n) {
          const double lam = lambda.lambda(n);
          const double big = lambda.prefix(n);
          const double diff = pow_nonneg(big, alpha) * one_minus_pow_complement(lam / big, alpha);
          inner += diff * x[n - 1];
          record(n, power_product({{lam, 1.0}, {inner.value(), p}}),
                 power_product({{lam, 1.0}, {big, alpha * p}, {x[n - 1], p}}));
        }
      }
      break;
    }
  }
  out.lhs = lhs.value();
  out.rhs_sum = rhs.value();
  return out;
}

TruncationReport eval_inequality(Family family, const Params& params, const Weights& lambda,
                                 std::span<const double> x) {
  TruncationReport report;
  report.family = family;
  report.params = params;
  report.N = lambda.size();
  report.constant = family_constant(family, params);

  const SideSums mid = evaluate_sides(family, params, lambda, x);
  report.lhs = mid.lhs;
  report.rhs_sum = mid.rhs_sum;
  report.rhs = report.constant * mid.rhs_sum;
  report.ratio = report.lhs / report.rhs;
  report.margin = params.reverse ? report.lhs - report.rhs : report.rhs - report.lhs;

  // Each side is monotone in a uniform shift of every Lambda*, so the ends of
  // the tail interval bound its effect.
  double spread = 0.0;
  if (uses_tail_sums(family) && !lambda.tail_beyond()->degenerate()) {
    for (double end : {lambda.tail_beyond()->lo, lambda.tail_beyond()->hi}) {
      SideOptions shifted;
      shifted.beyond_tail = end;
      const SideSums s = evaluate_sides(family, params, lambda, x, shifted);
      spread = std::max(spread, std::abs(s.lhs - mid.lhs) +
                                    report.constant * std::abs(s.rhs_sum - mid.rhs_sum));
    }
  }
  const double rounding = 1e-12 * (report.lhs + report.rhs);
  report.error_budget =
      rounding + spread + mid.lhs_outer_tail_hi + report.constant * mid.rhs_outer_tail_hi;

  if (report.margin > report.error_budget) {
    report.verdict = Verdict::Holds;
  } else if (report.margin < -report.error_budget) {
    report.verdict = Verdict::Fails;
  } else {
    report.verdict = Verdict::Inconclusive;
  }
  return report;
}

std::vector<double> SeparableKernel::apply(std::span<const double> v) const {
  const std::size_t N = size();
  std::vector<double> out(N);
  CompensatedSum acc;
  if (upper) {
    for (std::size_t i = N; i-- > 0;) {
      acc += col[i] * v[i];
      out[i] = row[i] * acc.value();
    }
  } else {
    for (std::size_t i = 0; i < N; ++i) {
      acc += col[i] * v[i];
      out[i] = row[i] * acc.value();
    }
  }
  return out;
}

std::vector<double> SeparableKernel::apply_transpose(std::span<const double> u) const {
  const std::size_t N = size();
  std::vector<double> out(N);
  CompensatedSum acc;
  if (upper) {
    for (std::size_t i = 0; i < N; ++i) {
      acc += row[i] * u[i];
      out[i] = col[i] * acc.value();
    }
  } else {
    for (std::size_t i = N; i-- > 0;) {
      acc += row[i] * u[i];
      out[i] = col[i] * acc.value();
    }
  }
  return out;
}

double SeparableKernel::entry(std::size_t n, std::size_t k) const {
  const bool inside = upper ? k >= n : k <= n;
  return inside ? row[n - 1] * col[k - 1] : 0.0;
}

SeparableKernel c2_recast_kernel(const Params& params, const Weights& lambda) {
  validate(Family::C2, params);
  const double p = params.p;
  const double c = params.c;
  SeparableKernel k;
  k.upper = true;
  k.row.resize(lambda.size());
  k.col.resize(lambda.size());
  for (std::size_t n = 1; n <= lambda.size(); ++n) {
    const double lam = lambda.lambda(n);
    const double big = lambda.prefix(n);
    k.row[n - 1] = power_product({{lam, 1.0 / p}, {big, -c / p}});
    k.col[n - 1] = power_product({{lam, 1.0 - 1.0 / p}, {big, -(1.0 - c / p)}});
  }
  return k;
}

std::vector<double> c2_recast_input(const Params& params, const Weights& lambda,
                                    std::span<const double> x) {
  if (x.size() != lambda.size()) throw std::invalid_argument("length mismatch");
  const double p = params.p;
  const double c = params.c;
  std::vector<double> z(x.size());
  for (std::size_t n = 1; n <= x.size(); ++n) {
    z[n - 1] = power_product(
        {{lambda.lambda(n), 1.0 / p}, {lambda.prefix(n), (p - c) / p}, {x[n - 1], 1.0}});
  }
  return z;
}

SeparableKernel bga_dual_kernel(const Params& params, const Weights& lambda) {
  validate(Family::BGA, params);
  if (!lambda.summable()) throw std::invalid_argument("BGA dual kernel needs summable weights");
  const double p = params.p;
  const double alpha = *params.alpha;
  SeparableKernel k;
  k.upper = true;
  k.row.resize(lambda.size());
  k.col.resize(lambda.size());
  for (std::size_t n = 1; n <= lambda.size(); ++n) {
    const double lam = lambda.lambda(n);
    const double ratio = one_minus_pow_complement(lam / lambda.tail(n), alpha);
    k.row[n - 1] = ratio / pow_nonneg(lam, 1.0 - 1.0 / p);
    k.col[n - 1] = pow_nonneg(lam, 1.0 - 1.0 / p);
  }
  return k;
}

SideSums eval_kernel_form(const SeparableKernel& kernel, double p, std::span<const double> z) {
  if (z.size() != kernel.size()) throw std::invalid_argument("length mismatch");
  const auto image = kernel.apply(z);
  CompensatedSum lhs;
  CompensatedSum rhs;
  for (std::size_t i = 0; i < z.size(); ++i) {
    lhs += pow_nonneg(image[i], p);
    rhs += pow_nonneg(z[i], p);
  }
  return {lhs.value(), rhs.value(), 0.0, 0.0};
}

}  // namespace copson
