#include "copson/scalar_core.hpp"

#include <cmath>
#include <functional>
#include <utility>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "copson/errors.hpp"
#include "copson/numeric.hpp"

namespace copson {

namespace {

void require_p(const Params& params) {
  if (!(params.p > 0.0) || !std::isfinite(params.p)) throw std::invalid_argument("p must be > 0");
}

void require_p_not_one(const Params& params) {
  require_p(params);
  if (params.p == 1.0) throw std::invalid_argument("p = 1 makes p/(p-1) undefined");
}

// (1 - x)^e with the x = 1 endpoint handled exactly.
double pow_complement(double x, double e) {
  if (x == 1.0) {
    if (e > 0.0) return 0.0;
    if (e == 0.0) return 1.0;
    throw std::domain_error("(1 - x)^" + std::to_string(e) + " is unbounded at x = 1");
  }
  return std::exp(e * std::log1p(-x));
}

// (1 + s)^e - 1 for s > -1
double pow1p_minus_one(double s, double e) {
  if (!(s > -1.0)) throw std::domain_error("1 + (1-c)x/p must stay positive");
  return std::expm1(e * std::log1p(s));
}

double lemma_t(const Params& params) {
  require_p(params);
  if (!std::isfinite(params.c)) throw std::invalid_argument("c must be finite");
  return (1.0 - params.c) / params.p;
}

double f_lemma(const Params& params, double x) {
  const double t = lemma_t(params);
  const double c = params.c;
  // the constant 1 of both powers cancels exactly
  double second = 0.0;
  if (x == 1.0) {
    second = pow_complement(x, 1.0 - c) - 1.0;
  } else {
    second = std::expm1((1.0 - c) * std::log1p(-x));
  }
  return pow1p_minus_one(t * x, 1.0 - params.p) - second - t * x;
}

double f_lemma_d1(const Params& params, double x) {
  const double t = lemma_t(params);
  const double p = params.p;
  const double c = params.c;
  const double first = (1.0 - c) * (1.0 - p) / p * std::pow(1.0 + t * x, -p);
  return first + (1.0 - c) * pow_complement(x, -c) - t;
}

double f_lemma_d2(const Params& params, double x) {
  const double t = lemma_t(params);
  const double p = params.p;
  const double c = params.c;
  const double first = (1.0 - c) * (1.0 - c) * (p - 1.0) / p * std::pow(1.0 + t * x, -p - 1.0);
  if (c == 0.0) return first;
  return first + (1.0 - c) * c * pow_complement(x, -c - 1.0);
}

double g_aux(const Params& params, double x) {
  const double t = lemma_t(params);
  const double p = params.p;
  const double c = params.c;
  const double k = -p * c / ((p - 1.0) * (1.0 - c));
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("g needs -pc/((p-1)(1-c)) > 0 (c < 0 < p - 1 or 0 < c < 1, p < 1)");
  }
  return std::pow(k, -1.0 / (p + 1.0)) * pow_complement(x, (1.0 + c) / (p + 1.0)) - 1.0 - t * x;
}

double lhs32(const Params& params, double x) {
  require_p_not_one(params);
  const double p = params.p;
  return p / (p - 1.0) * pow1p_minus_one(-x / p, 1.0 - p);
}

double rhs32(const Params& params, double x) {
  require_p(params);
  const double a = params.alpha_or_throw();
  if (a == 0.0) throw std::invalid_argument("alpha must be nonzero");
  if (x == 0.0) return 0.0;  // (1 - (1-x)^a)/(a x) -> 1
  const double diff = x == 1.0 ? 1.0 - pow_complement(x, a) : one_minus_pow_complement(x, a);
  return x * std::pow(diff / (a * x), params.p);
}

double f_alpha(const Params& params, double x) {
  require_p(params);
  const double a = params.alpha_or_throw();
  const double diff = x == 1.0 ? 1.0 - pow_complement(x, a) : one_minus_pow_complement(x, a);
  return a * x - (1.0 - x / (2.0 * params.p)) * diff;
}

double hadamard_lhs(const Params& params, double x) {
  require_p_not_one(params);
  if (x == 0.0) throw std::domain_error("Hadamard bound is 0/0 at x = 0");
  const double p = params.p;
  return (p / x) / (p - 1.0) * pow1p_minus_one(-x / p, 1.0 - p);
}

double hadamard_rhs(const Params& params, double x) {
  require_p(params);
  return std::pow(1.0 - x / (2.0 * params.p), -params.p);
}

}  // namespace

std::string_view to_string(ScalarFn fn) {
  switch (fn) {
    case ScalarFn::FLemma: return "F_LEMMA";
    case ScalarFn::FLemmaD1: return "F_LEMMA_D1";
    case ScalarFn::FLemmaD2: return "F_LEMMA_D2";
    case ScalarFn::GAux: return "G_AUX";
    case ScalarFn::Lhs32: return "LHS32";
    case ScalarFn::Rhs32: return "RHS32";
    case ScalarFn::FAlpha: return "F_ALPHA";
    case ScalarFn::HadamardLhs: return "HADAMARD_LHS";
    case ScalarFn::HadamardRhs: return "HADAMARD_RHS";
  }
  return "?";
}

ScalarFn parse_scalar_fn(std::string_view text) {
  for (ScalarFn fn : {ScalarFn::FLemma, ScalarFn::FLemmaD1, ScalarFn::FLemmaD2, ScalarFn::GAux,
                      ScalarFn::Lhs32, ScalarFn::Rhs32, ScalarFn::FAlpha, ScalarFn::HadamardLhs,
                      ScalarFn::HadamardRhs}) {
    if (text == to_string(fn)) return fn;
  }
  throw std::invalid_argument("unknown scalar function '" + std::string(text) + "'");
}

double scalar_eval(ScalarFn fn, const Params& params, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("x must lie in [0, 1]");
  switch (fn) {
    case ScalarFn::FLemma: return f_lemma(params, x);
    case ScalarFn::FLemmaD1: return f_lemma_d1(params, x);
    case ScalarFn::FLemmaD2: return f_lemma_d2(params, x);
    case ScalarFn::GAux: return g_aux(params, x);
    case ScalarFn::Lhs32: return lhs32(params, x);
    case ScalarFn::Rhs32: return rhs32(params, x);
    case ScalarFn::FAlpha: return f_alpha(params, x);
    case ScalarFn::HadamardLhs: return hadamard_lhs(params, x);
    case ScalarFn::HadamardRhs: return hadamard_rhs(params, x);
  }
  return 0.0;
}

double cond_26(double p, double c) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be > 0");
  const double t = (1.0 - c) / p;
  if (!(1.0 + t > 0.0)) throw std::domain_error("1 + (1-c)/p must be positive");
  return std::pow(1.0 + t, 1.0 - p) - t;
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::Lemma21: return "LEMMA21";
    case Condition::Cond26: return "COND26";
    case Condition::Cond32: return "COND32";
    case Condition::FAlphaNonneg: return "FALPHA_NONNEG";
    case Condition::Hadamard: return "HADAMARD";
  }
  return "?";
}

Condition parse_condition(std::string_view text) {
  for (Condition c : {Condition::Lemma21, Condition::Cond26, Condition::Cond32,
                      Condition::FAlphaNonneg, Condition::Hadamard}) {
    if (text == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown condition '" + std::string(text) + "'");
}

ScalarCheck check_condition(Condition cond, const Params& params, std::size_t grid_size,
                            double tolerance) {
  if (grid_size < 64) throw std::invalid_argument("grid size must be >= 64");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  require_p(params);
  const double orientation = params.reverse ? -1.0 : 1.0;

  ScalarCheck check;
  check.condition = cond;
  check.params = params;
  check.grid = grid_size;

  auto finish = [&](double x, double value) {
    check.min_value = value;
    check.argmin = x;
    check.pass = value >= -tolerance;
    if (!check.pass) check.witness = Witness{x, value};
    return check;
  };

  if (cond == Condition::Cond26) {
    return finish(1.0, orientation * cond_26(params.p, params.c));
  }

  std::function<double(double)> value;
  switch (cond) {
    case Condition::Lemma21:
      if (!(params.c < 1.0)) throw std::invalid_argument("LEMMA21 needs c < 1");
      value = [&](double x) { return orientation * f_lemma(params, x); };
      break;
    case Condition::Cond32:
      require_p_not_one(params);
      (void)params.alpha_or_throw();
      value = [&](double x) { return orientation * (lhs32(params, x) - rhs32(params, x)); };
      break;
    case Condition::FAlphaNonneg:
      (void)params.alpha_or_throw();
      value = [&](double x) { return orientation * f_alpha(params, x); };
      break;
    case Condition::Hadamard:
      require_p_not_one(params);
      value = [&](double x) {
        return orientation * (hadamard_lhs(params, x) - hadamard_rhs(params, x));
      };
      break;
    case Condition::Cond26: break;
  }

  const bool open_at_zero = cond == Condition::Hadamard;
  std::vector<double> xs(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    xs[i] = open_at_zero ? static_cast<double>(i + 1) / static_cast<double>(grid_size)
                         : static_cast<double>(i) / static_cast<double>(grid_size - 1);
  }
  std::size_t best = 0;
  double best_value = value(xs[0]);
  for (std::size_t i = 1; i < grid_size; ++i) {
    const double v = value(xs[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }

  // golden-section refinement on the two cells around the grid minimum
  double a = best > 0 ? xs[best - 1] : xs[0];
  double b = best + 1 < grid_size ? xs[best + 1] : xs[grid_size - 1];
  double best_x = xs[best];
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = value(x1);
  double f2 = value(x2);
  for (int iter = 0; iter < 200 && b - a > 1e-15; ++iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = value(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = value(x2);
    }
  }
  for (const auto& [x, v] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (v < best_value || (v == best_value && x < best_x)) {
      best_value = v;
      best_x = x;
    }
  }
  return finish(best_x, best_value);
}

C0Solution solve_c0(double p, double tol) {
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("solve_c0 needs p > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_c0 needs tol > 0");
  if (p == 1.0) return {0.0, cond_26(1.0, 0.0), 0, true};

  auto h = [p](double t) { return std::exp((1.0 - p) * std::log1p(t)) - t; };
  double lo = 0.0;
  double hi = 1.0;
  while (h(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw convergence_error("solve_c0: no sign change found");
  }
  int iterations = 0;
  while (iterations < 200) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    ++iterations;
    if (h(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi;
  C0Solution out;
  out.c0 = 1.0 - p * t;
  out.residual = cond_26(p, out.c0);
  out.iterations = iterations;
  if (!(std::abs(out.residual) < tol)) {
    throw convergence_error("solve_c0: residual " + std::to_string(out.residual) +
                            " above tolerance");
  }
  return out;
}

}  // namespace copson
