#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "copson/params.hpp"
#include "copson/sequences.hpp"

namespace copson {

/*!
  Inequality families. With lambda-weights, prefix sums Lambda_n and tail sums
  Lambda*_n:

    C1   sum lam_n Lam_n^{-c} (sum_{k<=n} lam_k x_k)^p  <= (p/(c-1))^p sum lam_n Lam_n^{p-c} x_n^p
    C2   sum lam_n Lam_n^{-c} (sum_{k>=n} lam_k x_k)^p  <= (p/(1-c))^p sum lam_n Lam_n^{p-c} x_n^p
    L1   as C1 with Lam* in place of Lam, constant (p/(1-c))^p
    L2   as C2 with Lam* in place of Lam, constant (p/(c-1))^p
    BG   sum lam_n (sum_{k>=n} Lam_k^a x_k)^p   <= (ap+1)^p sum lam_n Lam_n^{ap} (sum_{k>=n} x_k)^p
    BGA  sum lam_n (sum_{k<=n} Lam*_k^a x_k)^p  <= (ap+1)^p sum lam_n Lam*_n^{ap} (sum_{k<=n} x_k)^p
    I34  sum lam_n (sum_{k<=n} (Lam*_k^a - Lam*_{k+1}^a) y_k)^p <= (ap)^p sum lam_n Lam*_n^{ap} y_n^p
         (Tail direction), or with forward differences
         sum lam_n (sum_{k>=n} (Lam_k^a - Lam_{k-1}^a) x_k)^p <= (ap)^p sum lam_n (Lam_n^a x_n)^p
*/
enum class Family { C1, C2, L1, L2, BG, BGA, I34 };

enum class Verdict { Holds, Fails, Inconclusive };

[[nodiscard]] std::string_view to_string(Family f);
[[nodiscard]] std::string_view to_string(Verdict v);
[[nodiscard]] Family parse_family(std::string_view text);

/// True for families whose terms involve Lambda*.
[[nodiscard]] bool uses_tail_sums(Family f);
/// True for families that need alpha.
[[nodiscard]] bool uses_alpha(Family f);

/// The family's constant; throws std::invalid_argument for invalid params.
[[nodiscard]] double family_constant(Family f, const Params& params);

/// Throws std::invalid_argument when params do not fit the family.
void validate(Family f, const Params& params);

struct TruncationReport {
  Family family = Family::C1;
  Params params;
  std::size_t N = 0;
  double lhs = 0.0;
  double rhs_sum = 0.0;
  double constant = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double margin = 0.0;
  double error_budget = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

/*!
  Evaluates both sides of `family` with every sum truncated at N = x.size().

  The test sequence is taken as x_1..x_N followed by zeros, which is itself an
  admissible sequence, so a FAILS verdict is always a genuine counterexample.
  Outer sums that keep receiving mass beyond N (forward-summed families) are
  bounded analytically and the bound joins the error budget, together with the
  effect of the Lambda* tail interval and a rounding allowance.
*/
[[nodiscard]] TruncationReport eval_inequality(Family family, const Params& params,
                                               const Weights& lambda, std::span<const double> x);

/// Raw side sums, used by the ratio scans to extrapolate beyond N.
struct SideSums {
  double lhs = 0.0;
  double rhs_sum = 0.0;
  double lhs_outer_tail_hi = 0.0;  ///< bound on outer lhs terms n > N
  double rhs_outer_tail_hi = 0.0;  ///< bound on outer rhs terms n > N
};

struct SideOptions {
  /// Replaces the midpoint of the tail beyond N when forming Lambda*.
  std::optional<double> beyond_tail;
  /// Added to every inner tail sum sum_{k>=n} lam_k x_k (C2 and L2 only):
  /// the part of an infinite test sequence beyond N.
  double inner_tail = 0.0;
  /// When set, per-index lhs and rhs terms are written here (size N).
  std::vector<double>* lhs_terms = nullptr;
  std::vector<double>* rhs_terms = nullptr;
};

[[nodiscard]] SideSums evaluate_sides(Family family, const Params& params, const Weights& lambda,
                                      std::span<const double> x, const SideOptions& options = {});

/*!
  Nonnegative triangular kernel M(n,k) = row_n col_k, supported on k >= n
  (upper) or k <= n (lower). Both dual forms of the tail families have this
  shape, which lets M v and M^T u run in O(N).
*/
struct SeparableKernel {
  std::vector<double> row;
  std::vector<double> col;
  bool upper = true;

  [[nodiscard]] std::size_t size() const { return row.size(); }
  [[nodiscard]] std::vector<double> apply(std::span<const double> v) const;
  [[nodiscard]] std::vector<double> apply_transpose(std::span<const double> u) const;
  [[nodiscard]] double entry(std::size_t n, std::size_t k) const;  // 1-based
};

/// Kernel of the C2 inequality recast on plain l^p:
/// row_n = lam_n^{1/p} Lam_n^{-c/p}, col_k = lam_k^{1-1/p} Lam_k^{-(1-c/p)}, k >= n.
[[nodiscard]] SeparableKernel c2_recast_kernel(const Params& params, const Weights& lambda);

/// Substitution z_k = lam_k^{1/p} Lam_k^{(p-c)/p} x_k mapping C2 inputs to the recast form.
[[nodiscard]] std::vector<double> c2_recast_input(const Params& params, const Weights& lambda,
                                                  std::span<const double> x);

/// Dual kernel of the BGA intermediate inequality:
/// row_n = (Lam*_n^a - Lam*_{n+1}^a) / (lam_n^{1-1/p} Lam*_n^a), col_k = lam_k^{1-1/p}, k >= n.
[[nodiscard]] SeparableKernel bga_dual_kernel(const Params& params, const Weights& lambda);

/// lhs = sum_n (M z)_n^p and rhs_sum = sum_n z_n^p.
[[nodiscard]] SideSums eval_kernel_form(const SeparableKernel& kernel, double p,
                                        std::span<const double> z);

}  // namespace copson
