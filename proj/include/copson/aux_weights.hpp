#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "copson/evaluator.hpp"
#include "copson/params.hpp"
#include "copson/sequences.hpp"

namespace copson {

/*!
  Auxiliary weight schemes, each with w_1 = 1 and t = (1-c)/p:

    CopsonTail  w_n     = (Lam_{n-1}/Lam_n) (1 + t lam_n/Lam_n)^{-1} w_{n-1}      (for C2)
    Leindler    w_{n+1} = t (sum_{k<=n} lam_k w_k) / Lam*_{n+1}                   (for L1)
    Bg          w_{n+1} = (1 - lam_n/(p Lam_n)) w_n                               (for BG)
    Bga         w_n     = (1 - lam_n/(p Lam*_n))^{-1} w_{n-1}                     (for BGA)
*/
enum class WeightScheme { CopsonTail, Leindler, Bg, Bga };

[[nodiscard]] std::string_view to_string(WeightScheme s);
/// Accepts COPSON_TAIL / copson-tail style names.
[[nodiscard]] WeightScheme parse_scheme(std::string_view text);
/// Inequality family a scheme certifies.
[[nodiscard]] Family certified_family(WeightScheme s);
/// True for schemes whose condition involves sums over k >= n.
[[nodiscard]] bool uses_forward_tail(WeightScheme s);

/// w_1..w_N for the scheme. Throws std::invalid_argument when a recurrence
/// factor would be nonpositive or Lambda* is missing, convergence_error on overflow.
[[nodiscard]] std::vector<double> build_weights(WeightScheme scheme, const Params& params,
                                                const Weights& lambda);

struct CertificateOptions {
  double tolerance = 1e-9;
  /// Count the last ceil(N/10) rows of the k >= n schemes in the verdict.
  bool include_tail_rows = false;
};

/*!
  Per-row residuals r_n = RHS - LHS of the scheme's sufficient condition
  (negated under reverse).

  Sums over k >= n are formed as sum_{k=n}^{N} lam_k w_k plus the remainder the
  defining relation implies beyond N (K Lam_N w_N for CopsonTail,
  K' Lam*_{N+1} w_N for Bga). That remainder bounds the true one from above,
  so truncation never makes a row look better than it is.

  Rows whose residual is within the rounding allowance of zero are
  indeterminate and do not enter min_residual unless every row is.
*/
struct WeightCertificate {
  WeightScheme scheme = WeightScheme::CopsonTail;
  Params params;
  std::size_t N = 0;
  std::vector<double> w;
  std::vector<double> residuals;   ///< one per checked row, row n at index n-1
  std::vector<double> allowances;  ///< rounding allowance per row
  double min_residual = 0.0;
  std::size_t argmin_index = 0;  ///< 1-based
  std::size_t excluded_from = 0;  ///< first excluded row, 0 if none
  std::size_t excluded_count = 0;
  std::size_t indeterminate_rows = 0;
  bool pass = false;
};

/// Checks the condition rows for the given w (any positive sequence of length N).
/// CopsonTail and Bga check rows 1..N, Leindler and Bg rows 1..N-1.
[[nodiscard]] WeightCertificate verify_certificate(WeightScheme scheme, const Params& params,
                                                   const Weights& lambda, std::span<const double> w,
                                                   const CertificateOptions& options = {});

/// build_weights followed by verify_certificate.
[[nodiscard]] WeightCertificate certify(WeightScheme scheme, const Params& params,
                                        const Weights& lambda,
                                        const CertificateOptions& options = {});

enum class MasterForm { M22, M27 };

[[nodiscard]] std::string_view to_string(MasterForm f);
[[nodiscard]] MasterForm parse_master_form(std::string_view text);

/// a, b, w positive, x nonnegative, all of length N.
struct MasterCheckInput {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> w;
  std::vector<double> x;
  double U_p = 1.0;
  double p = 2.0;
};

struct MasterReport {
  MasterForm form = MasterForm::M22;
  std::size_t N = 0;
  double p = 0.0;
  /// M22: left side of the two-term inequality. M27: sum_n (a_n sum_{k<=n} b_k x_k)^p.
  double lhs = 0.0;
  /// M22: sum x_n^p. M27: U_p sum x_n^p.
  double rhs = 0.0;
  double residual = 0.0;  ///< rhs - lhs
  /// M27 rows n = 1..N-1: U_p a_n^{-p} (w_n^{p-1}/b_n^p - w_{n+1}^{p-1}/b_{n+1}^p) - (sum_{k<=n} w_k)^{p-1}
  std::vector<double> row_residuals;
  double min_row_residual = 0.0;
  std::size_t argmin_row = 0;
  bool rows_pass = true;
  /// M27 evaluates the implied inequality only when every row passes.
  bool implied_evaluated = false;
  bool pass = false;
};

[[nodiscard]] MasterReport verify_master(MasterForm form, const MasterCheckInput& input,
                                         double tolerance = 1e-10);

/// Inputs of the C2 recast: a_n = lam_n^{-1/p} Lam_n^{c/p},
/// b_n = lam_n^{1-1/p} Lam_n^{-(1-c/p)}, w_n = lam_n w^{CopsonTail}_n, U_p = (p/(1-c))^p.
[[nodiscard]] MasterCheckInput copson_master_input(const Params& params, const Weights& lambda,
                                                   std::span<const double> x);

/// Inputs of the BG reduction: a_n = (Lam_n^a - Lam_{n-1}^a)/(lam_n^{1-1/p} Lam_n^a),
/// b_n = lam_n^{1-1/p}, w_n = lam_n w^{Bg}_n, U_p = (a p/(p-1))^p.
[[nodiscard]] MasterCheckInput bg_master_input(const Params& params, const Weights& lambda,
                                               std::span<const double> x);

}  // namespace copson
