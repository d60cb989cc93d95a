#pragma once

#include <cmath>
#include <initializer_list>
#include <limits>
#include <utility>

namespace copson {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double midpoint() const { return lo + 0.5 * (hi - lo); }
  [[nodiscard]] double half_width() const { return 0.5 * (hi - lo); }
  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] bool degenerate() const { return lo == hi; }
  [[nodiscard]] bool contains(double v) const { return lo <= v && v <= hi; }
};

/*!
  Neumaier's variant of Kahan summation. Unlike plain Kahan it stays exact
  when an addend is larger in magnitude than the running sum, which happens
  in the first steps of every prefix accumulation.
*/
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double start) : sum_(start) {}

  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) {
    add(value);
    return *this;
  }

  [[nodiscard]] double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// t^e for t >= 0 via exp(e log t), with 0^e = 0 for e > 0 and 0^0 = 1.
inline double pow_nonneg(double t, double e) {
  if (t == 0.0) {
    if (e > 0.0) return 0.0;
    if (e == 0.0) return 1.0;
    return std::numeric_limits<double>::infinity();
  }
  return std::exp(e * std::log(t));
}

/*!
  Product of powers prod_i base_i^exp_i evaluated in log space, so that
  products such as lambda_n * tail_n^{-c} stay finite when the individual
  factors would overflow. A zero base with positive exponent makes the whole
  product zero; a zero exponent drops its factor.
*/
inline double power_product(std::initializer_list<std::pair<double, double>> factors) {
  double log_sum = 0.0;
  for (const auto& [base, e] : factors) {
    if (e == 0.0) continue;
    if (base == 0.0) {
      if (e > 0.0) return 0.0;
      return std::numeric_limits<double>::infinity();
    }
    log_sum += e * std::log(base);
  }
  return std::exp(log_sum);
}

/// 1 - (1 - x)^a without cancellation for small x, x in [0, 1].
inline double one_minus_pow_complement(double x, double a) {
  if (x >= 1.0) return a > 0.0 ? 1.0 : (a == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity());
  return -std::expm1(a * std::log1p(-x));
}

}  // namespace copson
