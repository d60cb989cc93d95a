#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "copson/numeric.hpp"

namespace copson {

namespace seq {

/// n -> value
struct Const {
  double value = 1.0;
};
/// n -> n^exponent
struct Pow {
  double exponent = 0.0;
};
/// n -> value * ratio^(n-1), 0 < ratio < 1
struct Geom {
  double ratio = 0.5;
  double value = 1.0;
};
/// Indicator of a single position (1-based).
struct Unit {
  std::size_t position = 1;
};
/// Explicit list in index order.
struct Explicit {
  std::vector<double> terms;
};
/// n -> n^{(c - p - 1 - eps)/p}; the test sequence that makes the Copson
/// constants sharp as eps -> 0+.
struct ExtremalCopson {
  double p = 2.0;
  double c = 0.0;
  double eps = 1.0;

  [[nodiscard]] double exponent() const { return (c - p - 1.0 - eps) / p; }
};
/// Test sequence n -> n^b paired with weights n^{-decay}, where
/// b = ((decay - 1)(alpha p + 1) - eps)/p - 1.
struct ExtremalBga {
  double decay = 2.0;
  double alpha = 1.0;
  double p = 2.0;
  double eps = 1.0;

  [[nodiscard]] double exponent() const {
    return ((decay - 1.0) * (alpha * p + 1.0) - eps) / p - 1.0;
  }
};

}  // namespace seq

using SequenceSpec = std::variant<seq::Const, seq::Pow, seq::Geom, seq::Unit, seq::Explicit,
                                  seq::ExtremalCopson, seq::ExtremalBga>;

/// Checks the per-kind invariants; throws std::invalid_argument.
void validate(const SequenceSpec& spec);

/// Term n (1-based) of the spec.
[[nodiscard]] double term(const SequenceSpec& spec, std::size_t n);

/// First N terms. Throws std::invalid_argument for N == 0, a UNIT position
/// beyond N, an explicit list shorter than N, or invalid spec parameters.
[[nodiscard]] std::vector<double> materialize(const SequenceSpec& spec, std::size_t N);

/// Bounds on sum_{n > N} term(n). Throws std::invalid_argument when the spec
/// is not summable.
[[nodiscard]] Interval tail_bound(const SequenceSpec& spec, std::size_t N);

[[nodiscard]] bool summable(const SequenceSpec& spec);

/// The weight sequence n -> n^{-decay} that pairs with an ExtremalBga test
/// sequence.
[[nodiscard]] SequenceSpec paired_weights(const seq::ExtremalBga& spec);

/// Largest length <= N over which the terms decay by at most 1e-30 (only
/// geometric sequences are affected). Longer geometric runs add nothing to
/// any sum and push tail-sum powers toward overflow.
[[nodiscard]] std::size_t representable_length(const SequenceSpec& spec, std::size_t N);

/// Weight sequence lambda_1..lambda_N with prefix sums, tail sums and the
/// bound on what lies beyond N.
class Weights {
 public:
  Weights() = default;

  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const { return values_; }

  /// lambda_n, 1 <= n <= N
  [[nodiscard]] double lambda(std::size_t n) const { return values_[n - 1]; }
  /// Lambda_n = sum_{i <= n} lambda_i, 0 <= n <= N, Lambda_0 = 0
  [[nodiscard]] double prefix(std::size_t n) const { return prefix_[n]; }
  /// sum_{k=n}^{N} lambda_k, 1 <= n <= N + 1
  [[nodiscard]] double suffix(std::size_t n) const { return suffix_[n - 1]; }

  [[nodiscard]] bool summable() const { return tail_beyond_.has_value(); }
  [[nodiscard]] const std::optional<Interval>& tail_beyond() const { return tail_beyond_; }

  /// Lambda*_n = suffix(n) + midpoint of the tail beyond N, 1 <= n <= N + 1.
  /// Only valid when summable().
  [[nodiscard]] double tail(std::size_t n) const { return suffix_[n - 1] + tail_mid_; }
  /// Lambda*_n with the beyond-N tail replaced by `beyond`.
  [[nodiscard]] double tail_with(std::size_t n, double beyond) const {
    return suffix_[n - 1] + beyond;
  }
  /// Half-width of the beyond-N interval; the error carried by every tail().
  [[nodiscard]] double tail_half_width() const {
    return tail_beyond_ ? tail_beyond_->half_width() : 0.0;
  }

  friend Weights cumulate(std::span<const double> values, std::optional<Interval> tail_beyond_N);

 private:
  std::vector<double> values_;
  std::vector<double> prefix_;  // N + 1 entries
  std::vector<double> suffix_;  // N + 1 entries, last is 0
  std::optional<Interval> tail_beyond_;
  double tail_mid_ = 0.0;
};

/// Builds prefix and tail sums with compensated summation. Throws
/// std::invalid_argument for a nonpositive value or an interval with hi < lo.
[[nodiscard]] Weights cumulate(std::span<const double> values, std::optional<Interval> tail_beyond_N);

/// Materializes a weight spec and attaches its tail bound when summable.
[[nodiscard]] Weights make_weights(const SequenceSpec& spec, std::size_t N);

/// Values that the sequence mini-language leaves to the surrounding command.
struct SpecContext {
  double p = 2.0;
  double c = 0.0;
  double alpha = 1.0;
};

enum class SequenceRole { Weights, TestSequence };

/*!
  Parses the sequence mini-language:

      const:V  pow:A  geom:R[:V]  unit:M  file:PATH
      extremal-copson:EPS  extremal-bga:A,EPS

  Numbers use '.' as decimal separator regardless of locale. Files hold one
  decimal per line; blank lines and lines starting with '#' are skipped.
  Weight files must be strictly positive, test-sequence files nonnegative.
  Throws std::invalid_argument for grammar errors and copson::data_error for
  unreadable or malformed files.
*/
[[nodiscard]] SequenceSpec parse_sequence_spec(std::string_view text, const SpecContext& ctx,
                                               SequenceRole role = SequenceRole::TestSequence);

[[nodiscard]] std::string to_string(const SequenceSpec& spec);

/// Locale-independent strict double parse; throws std::invalid_argument.
[[nodiscard]] double parse_double(std::string_view text);

}  // namespace copson
