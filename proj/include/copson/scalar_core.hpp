#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "copson/params.hpp"

namespace copson {

/*!
  Scalar functions behind the weight-sequence proofs, all on x in [0, 1].
  With t = (1 - c)/p:

    FLemma      f(x)  = (1 + t x)^{1-p} - (1 - x)^{1-c} - t x
    FLemmaD1    f'(x) = (1-c)(1-p)/p (1 + t x)^{-p} + (1-c)(1-x)^{-c} - t
    FLemmaD2    f''(x)= (1-c)^2 (p-1)/p (1 + t x)^{-p-1} + (1-c) c (1-x)^{-c-1}
    GAux        g(x)  = (-pc/((p-1)(1-c)))^{-1/(p+1)} (1-x)^{(1+c)/(p+1)} - 1 - t x
    Lhs32       p/(p-1) ((1 - x/p)^{1-p} - 1)
    Rhs32       x ((1 - (1-x)^a)/(a x))^p
    FAlpha      a x - (1 - x/(2p)) (1 - (1-x)^a)
    HadamardLhs (p/x)/(p-1) ((1 - x/p)^{1-p} - 1)        on (0, 1]
    HadamardRhs (1 - x/(2p))^{-p}

  f'' = 0 iff g = 0 wherever g is defined (c < 0 < p - 1 or 0 < c < 1, p < 1).
*/
enum class ScalarFn {
  FLemma,
  FLemmaD1,
  FLemmaD2,
  GAux,
  Lhs32,
  Rhs32,
  FAlpha,
  HadamardLhs,
  HadamardRhs,
};

[[nodiscard]] std::string_view to_string(ScalarFn fn);
[[nodiscard]] ScalarFn parse_scalar_fn(std::string_view text);

/// Closed-form value. Throws std::domain_error for x outside the function's
/// domain (including a negative power of 1 - x at x = 1) and
/// std::invalid_argument for unusable params.
[[nodiscard]] double scalar_eval(ScalarFn fn, const Params& params, double x);

/// (1 + (1-c)/p)^{1-p} - (1-c)/p, the x = 1 case of the lemma inequality.
[[nodiscard]] double cond_26(double p, double c);

enum class Condition {
  Lemma21,       ///< f >= 0 on [0, 1] (f <= 0 when reversed)
  Cond26,        ///< cond_26 >= 0 (<= 0 when reversed)
  Cond32,        ///< Lhs32 >= Rhs32 on [0, 1]
  FAlphaNonneg,  ///< FAlpha >= 0 on [0, 1]
  Hadamard,      ///< HadamardLhs >= HadamardRhs on (0, 1]
};

[[nodiscard]] std::string_view to_string(Condition c);
[[nodiscard]] Condition parse_condition(std::string_view text);

struct Witness {
  double x = 0.0;
  double value = 0.0;
};

struct ScalarCheck {
  Condition condition = Condition::Lemma21;
  Params params;
  std::size_t grid = 0;
  /// Minimum of the oriented quantity (the one that must be >= 0).
  double min_value = 0.0;
  double argmin = 0.0;
  bool pass = false;
  std::optional<Witness> witness;
};

/*!
  Scans the condition on a uniform grid (Hadamard skips x = 0), then refines
  the grid minimum with golden-section search on the neighbouring cells.
  PASS iff the minimum is >= -tolerance. Ties go to the smallest x.
*/
[[nodiscard]] ScalarCheck check_condition(Condition cond, const Params& params,
                                          std::size_t grid_size = 4096, double tolerance = 1e-12);

struct C0Solution {
  double c0 = 0.0;
  /// (1 + (1-c0)/p)^{1-p} - (1-c0)/p at the returned c0.
  double residual = 0.0;
  int iterations = 0;
  /// p == 1: the equation degenerates; c0 = 0 is returned by continuity.
  bool degenerate = false;
};

/*!
  Critical exponent: the root of (1 + t)^{1-p} - t = 0 in t = (1 - c0)/p,
  found by bisection. h(t) = (1 + t)^{1-p} - t is strictly decreasing with
  h(0) = 1, so the root is unique and the doubling bracket always closes.
*/
[[nodiscard]] C0Solution solve_c0(double p, double tol = 1e-12);

}  // namespace copson
