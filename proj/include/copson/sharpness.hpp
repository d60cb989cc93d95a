#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "copson/aux_weights.hpp"
#include "copson/evaluator.hpp"
#include "copson/params.hpp"
#include "copson/sequences.hpp"

namespace copson {

// ---------------------------------------------------------------- ratio scan

struct RatioEntry {
  double eps = 0.0;
  std::size_t N = 0;
  /// lhs/rhs_sum with both outer sums extrapolated beyond N.
  double ratio = 0.0;
  /// lhs/rhs_sum of the truncated sums alone.
  double finite_ratio = 0.0;
  /// ratio / target
  double normalized_ratio = 0.0;
  /// Spread between the estimate at N and at N/2, plus the effect of the
  /// analytic tail intervals.
  double budget = 0.0;
  /// budget < 1% of ratio
  bool conclusive = false;
};

struct RatioScan {
  Family family = Family::C1;
  Params params;
  std::string lambda_spec;
  std::string x_spec;
  double target = 0.0;
  std::vector<RatioEntry> entries;
  /// Ratios strictly increase along the (decreasing) eps list.
  bool monotone = false;
  /// Every ratio is below the target.
  bool below_target = false;
};

struct RatioScanOptions {
  std::size_t N = 100000;
  /// Replaces the extremal test sequence (for degenerate single-support scans).
  std::optional<SequenceSpec> x_override;
  /// Weight decay a in lam_n = n^{-a} for BGA scans.
  double decay = 2.0;
  std::size_t jobs = 1;
};

/*!
  Ratio of the two sides on the extremal sequences: lam = 1 with
  x_n = n^{(c-p-1-eps)/p} for C1 and C2, lam_n = n^{-a} with
  x_n = n^{((a-1)(alpha p+1)-eps)/p - 1} for BGA. eps_list must be positive and
  strictly decreasing.
*/
[[nodiscard]] RatioScan ratio_scan(Family family, const Params& params,
                                   const std::vector<double>& eps_list,
                                   const RatioScanOptions& options = {});

// ------------------------------------------------------------ norm estimate

enum class DualForm { C2Dual, BgaDual };

[[nodiscard]] std::string_view to_string(DualForm f);
[[nodiscard]] DualForm parse_dual_form(std::string_view text);

struct NormEstimate {
  DualForm form = DualForm::C2Dual;
  Params params;
  std::size_t N = 0;
  double value = 0.0;
  /// p/(1-c) for C2Dual, alpha p/(p-1) for BgaDual.
  double bound = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Relative change between the last two iterates.
  double last_gap = 0.0;
};

/*!
  l^p -> l^p norm of the dual kernel by nonlinear power iteration
  u = M v, v <- normalize((M^T u^{p-1})^{1/(p-1)}), from the uniform vector.
  Non-convergence is reported in the result, not thrown.
*/
[[nodiscard]] NormEstimate norm_estimate(DualForm form, const Params& params,
                                         const Weights& lambda, double tol = 1e-13,
                                         int max_iter = 100000);

// ----------------------------------------------------------------- region map

enum class RegionMode { PC, PA };

[[nodiscard]] std::string_view to_string(RegionMode m);
[[nodiscard]] RegionMode parse_region_mode(std::string_view text);

/// lo:hi:step, inclusive of hi up to rounding.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  [[nodiscard]] std::vector<double> values() const;
};

[[nodiscard]] Range parse_range(std::string_view text);

enum class CellClass { Sufficient, HoldsOnBattery, CertFailNoCounterexample, Fails, Inconclusive };

[[nodiscard]] std::string_view to_string(CellClass c);

struct RegionCell {
  double p = 0.0;
  double second = 0.0;  ///< c in PC mode, alpha in PA mode
  std::string cert_verdict;     ///< CERT_PASS, CERT_FAIL or N/A
  Verdict battery_verdict = Verdict::Inconclusive;
  /// min over the battery of 1 - lhs/rhs (ratio - 1 under reverse)
  double min_margin = 0.0;
  CellClass cls = CellClass::Inconclusive;
};

struct OverlayPoint {
  double p = 0.0;
  double value = 0.0;  ///< c0(p) in PC mode, 1 - 1/(2p) in PA mode
  bool degenerate = false;
};

struct RegionMap {
  RegionMode mode = RegionMode::PC;
  Family family = Family::C2;
  std::size_t N = 0;
  std::vector<RegionCell> cells;  ///< p-major order
  std::vector<OverlayPoint> overlay;
};

struct RegionOptions {
  RegionMode mode = RegionMode::PC;
  /// C2 or L1 in PC mode, BG or BGA in PA mode.
  std::optional<Family> family;
  Range p_range;
  Range second_range;
  std::size_t N = 100000;
  double tolerance = 1e-9;
  std::size_t jobs = 1;
};

/// Weight battery const:1, geom:1/2, pow:-2 (summable members only when the
/// family needs tail sums) and test battery unit:1, unit:3, pow:-2, geom:1/3.
[[nodiscard]] std::vector<SequenceSpec> weight_battery(bool summable_only);
[[nodiscard]] std::vector<SequenceSpec> test_battery();

/// Certificate scheme tied to a family, if the family has one.
[[nodiscard]] std::optional<WeightScheme> scheme_for(Family f);

[[nodiscard]] RegionMap region_map(const RegionOptions& options);

// ------------------------------------------------------ counterexample search

struct SearchOptions {
  std::size_t N = 100000;
  SequenceSpec lambda = seq::Const{1.0};
  double tolerance = 1e-9;
  std::size_t jobs = 1;
  std::size_t max_support = 32;
};

struct SearchResult {
  Family family = Family::C1;
  Params params;
  std::string lambda_spec;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  /// lhs/(C rhs_sum), or C rhs_sum/lhs under reverse; above 1 means a violation.
  double best_ratio = 0.0;
  std::vector<std::size_t> positions;  ///< 1-based support of the witness
  std::vector<double> values;
  double single_support_best = 0.0;
  std::size_t single_support_position = 0;
  std::size_t evaluations = 0;
  std::size_t restarts = 0;
  /// best_ratio > 1 + max(10 budget, tol) at N.
  bool claimed = false;
  /// Dense re-evaluation at 2N, run only for claims.
  std::optional<Verdict> reverify_verdict;
};

/// Maximizes the side ratio over finite-support x: every single support
/// first, then seeded random restarts with coordinate ascent.
/// budget caps the restart phase; the single-support sweep (N evaluations)
/// is counted in evaluations on top of it.
[[nodiscard]] SearchResult counterexample_search(Family family, const Params& params,
                                                 std::size_t budget, std::uint64_t seed,
                                                 const SearchOptions& options = {});

}  // namespace copson
