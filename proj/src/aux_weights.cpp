#include "copson/aux_weights.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "copson/errors.hpp"
#include "copson/numeric.hpp"

namespace copson {

std::string_view to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::CopsonTail: return "COPSON_TAIL";
    case WeightScheme::Leindler: return "LEINDLER";
    case WeightScheme::Bg: return "BG";
    case WeightScheme::Bga: return "BGA";
  }
  return "?";
}

WeightScheme parse_scheme(std::string_view text) {
  std::string norm(text);
  for (char& ch : norm) ch = ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (WeightScheme s : {WeightScheme::CopsonTail, WeightScheme::Leindler, WeightScheme::Bg,
                         WeightScheme::Bga}) {
    if (norm == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

Family certified_family(WeightScheme s) {
  switch (s) {
    case WeightScheme::CopsonTail: return Family::C2;
    case WeightScheme::Leindler: return Family::L1;
    case WeightScheme::Bg: return Family::BG;
    case WeightScheme::Bga: return Family::BGA;
  }
  return Family::C2;
}

bool uses_forward_tail(WeightScheme s) {
  return s == WeightScheme::CopsonTail || s == WeightScheme::Bga;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_summable(const Weights& lambda, WeightScheme s) {
  if (!lambda.summable()) {
    throw std::invalid_argument(std::string(to_string(s)) + " needs summable weights (Lambda*)");
  }
}

void validate_scheme(WeightScheme scheme, const Params& params, const Weights& lambda) {
  if (lambda.size() == 0) throw std::invalid_argument("N must be >= 1");
  if (!(params.p > 0.0) || !std::isfinite(params.p)) throw std::invalid_argument("p must be > 0");
  switch (scheme) {
    case WeightScheme::CopsonTail:
      if (!(params.c < 1.0)) throw std::invalid_argument("COPSON_TAIL needs c < 1");
      break;
    case WeightScheme::Leindler:
      if (!(params.c < 1.0)) throw std::invalid_argument("LEINDLER needs c < 1");
      require_summable(lambda, scheme);
      break;
    case WeightScheme::Bg:
      if (!(params.p > 1.0)) throw std::invalid_argument("BG weights need p > 1");
      break;
    case WeightScheme::Bga:
      if (!(params.p > 1.0)) throw std::invalid_argument("BGA weights need p > 1");
      require_summable(lambda, scheme);
      break;
  }
}

void check_finite(double v, std::size_t n) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw convergence_error("weight w_" + std::to_string(n) + " left the representable range");
  }
}

// a^e - b^e computed as a^e (1 - (b/a)^e) with the log of the ratio supplied,
// which keeps full relative accuracy when b is close to a.
double power_gap(double a, double e, double log_ratio) {
  return pow_nonneg(a, e) * -std::expm1(e * log_ratio);
}

struct Row {
  double lhs = 0.0;
  double rhs = 0.0;
  // The RHS is a prefactor of size 1/x times a difference of powers of
  // neighbouring w, so an absolute rounding error of a few ulps in the log
  // of their ratio is amplified by prefactor * w^{p-1} * exponent.
  double amplification = 0.0;
};

// B = alpha x / (1 - (1 - x)^alpha), the ratio that turns the alpha-power
// difference into the condition's bracket.
double bracket(double alpha, double x) { return alpha * x / one_minus_pow_complement(x, alpha); }

}  // namespace

std::vector<double> build_weights(WeightScheme scheme, const Params& params,
                                  const Weights& lambda) {
  validate_scheme(scheme, params, lambda);
  const std::size_t N = lambda.size();
  const double p = params.p;
  const double t = (1.0 - params.c) / p;
  std::vector<double> w(N);
  w[0] = 1.0;
  switch (scheme) {
    case WeightScheme::CopsonTail:
      for (std::size_t n = 2; n <= N; ++n) {
        const double x = lambda.lambda(n) / lambda.prefix(n);
        w[n - 1] = lambda.prefix(n - 1) / lambda.prefix(n) / (1.0 + t * x) * w[n - 2];
        check_finite(w[n - 1], n);
      }
      break;
    case WeightScheme::Leindler: {
      CompensatedSum s;
      for (std::size_t n = 1; n < N; ++n) {
        s += lambda.lambda(n) * w[n - 1];
        w[n] = t * s.value() / lambda.tail(n + 1);
        check_finite(w[n], n + 1);
      }
      break;
    }
    case WeightScheme::Bg:
      for (std::size_t n = 1; n < N; ++n) {
        const double x = lambda.lambda(n) / lambda.prefix(n);
        w[n] = (1.0 - x / p) * w[n - 1];
        check_finite(w[n], n + 1);
      }
      break;
    case WeightScheme::Bga:
      for (std::size_t n = 2; n <= N; ++n) {
        const double x = lambda.lambda(n) / lambda.tail(n);
        w[n - 1] = w[n - 2] / (1.0 - x / p);
        check_finite(w[n - 1], n);
      }
      break;
  }
  return w;
}

WeightCertificate verify_certificate(WeightScheme scheme, const Params& params,
                                     const Weights& lambda, std::span<const double> w,
                                     const CertificateOptions& options) {
  validate_scheme(scheme, params, lambda);
  const std::size_t N = lambda.size();
  if (w.size() != N) {
    throw std::invalid_argument("length mismatch: w has " + std::to_string(w.size()) +
                                " terms, lambda has " + std::to_string(N));
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
      throw std::invalid_argument("w_" + std::to_string(i + 1) + " must be positive");
    }
  }
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");

  const double p = params.p;
  const double c = params.c;
  const double e = p - 1.0;
  std::vector<Row> rows;

  switch (scheme) {
    case WeightScheme::CopsonTail: {
      const double K = p / (1.0 - c);
      const double Kp = std::pow(K, p);
      // T_n = sum_{k=n}^N lam_k w_k + K Lam_N w_N
      std::vector<double> T(N);
      CompensatedSum s(K * lambda.prefix(N) * w[N - 1]);
      for (std::size_t n = N; n >= 1; --n) {
        s += lambda.lambda(n) * w[n - 1];
        T[n - 1] = s.value();
      }
      rows.resize(N);
      rows[0] = {pow_nonneg(T[0] / lambda.prefix(1), e), Kp * pow_nonneg(w[0], e)};
      for (std::size_t n = 2; n <= N; ++n) {
        const double x = lambda.lambda(n) / lambda.prefix(n);
        const double log_ratio = e * std::log(w[n - 2] / w[n - 1]) + (p - c) * std::log1p(-x);
        const double diff = pow_nonneg(w[n - 1], e) * -std::expm1(log_ratio);
        rows[n - 1] = {pow_nonneg(T[n - 1] / lambda.prefix(n), e), Kp / x * diff,
                       Kp / x * pow_nonneg(w[n - 1], e) * (std::abs(e) + std::abs(p - c))};
      }
      break;
    }
    case WeightScheme::Leindler: {
      if (N < 2) throw std::invalid_argument("LEINDLER certificate needs N >= 2");
      const double K = p / (1.0 - c);
      const double Kp = std::pow(K, p);
      rows.resize(N - 1);
      CompensatedSum s;
      for (std::size_t n = 1; n < N; ++n) {
        s += lambda.lambda(n) * w[n - 1];
        const double tail = lambda.tail(n);
        const double x = lambda.lambda(n) / tail;
        const double log_ratio =
            e * std::log(w[n] / w[n - 1]) + (p - c) * std::log(lambda.tail(n + 1) / tail);
        const double diff = pow_nonneg(w[n - 1], e) * -std::expm1(log_ratio);
        rows[n - 1] = {pow_nonneg(s.value() / tail, e), Kp / x * diff,
                       Kp / x * pow_nonneg(w[n - 1], e) * (std::abs(e) + std::abs(p - c))};
      }
      break;
    }
    case WeightScheme::Bg: {
      if (N < 2) throw std::invalid_argument("BG certificate needs N >= 2");
      const double alpha = params.alpha_or_throw();
      if (!(alpha > 0.0)) throw std::invalid_argument("BG certificate needs alpha > 0");
      const double Kp = std::pow(p / (p - 1.0), p);
      rows.resize(N - 1);
      CompensatedSum s;
      for (std::size_t n = 1; n < N; ++n) {
        s += lambda.lambda(n) * w[n - 1];
        const double x = lambda.lambda(n) / lambda.prefix(n);
        const double B = bracket(alpha, x);
        const double diff = power_gap(w[n - 1], e, std::log(w[n] / w[n - 1]));
        const double pre = Kp * pow_nonneg(B, p) / x;
        rows[n - 1] = {pow_nonneg(s.value() / lambda.prefix(n), e), pre * diff,
                       pre * pow_nonneg(w[n - 1], e) * std::abs(e)};
      }
      break;
    }
    case WeightScheme::Bga: {
      const double alpha = params.alpha_or_throw();
      if (!(alpha > 0.0)) throw std::invalid_argument("BGA certificate needs alpha > 0");
      const double Kprime = p / (p - 1.0);
      const double Kp = std::pow(Kprime, p);
      std::vector<double> T(N);
      CompensatedSum s(Kprime * lambda.tail(N + 1) * w[N - 1]);
      for (std::size_t n = N; n >= 1; --n) {
        s += lambda.lambda(n) * w[n - 1];
        T[n - 1] = s.value();
      }
      rows.resize(N);
      for (std::size_t n = 1; n <= N; ++n) {
        const double tail = lambda.tail(n);
        const double x = lambda.lambda(n) / tail;
        const double B = bracket(alpha, x);
        const double diff = n == 1 ? pow_nonneg(w[0], e)
                                   : power_gap(w[n - 1], e, std::log(w[n - 2] / w[n - 1]));
        const double pre = Kp * pow_nonneg(B, p) / x;
        rows[n - 1] = {pow_nonneg(T[n - 1] / tail, e), pre * diff,
                       n == 1 ? 0.0 : pre * pow_nonneg(w[n - 1], e) * std::abs(e)};
      }
      break;
    }
  }

  WeightCertificate cert;
  cert.scheme = scheme;
  cert.params = params;
  cert.N = N;
  cert.w.assign(w.begin(), w.end());
  const double orientation = params.reverse ? -1.0 : 1.0;
  const std::size_t R = rows.size();
  cert.residuals.resize(R);
  cert.allowances.resize(R);
  for (std::size_t i = 0; i < R; ++i) {
    cert.residuals[i] = orientation * (rows[i].rhs - rows[i].lhs);
    cert.allowances[i] = 32.0 * kEps *
                         (std::abs(rows[i].lhs) + std::abs(rows[i].rhs) + rows[i].amplification);
  }

  std::size_t counted = R;
  if (uses_forward_tail(scheme) && !options.include_tail_rows && N >= 10) {
    const std::size_t excluded = (N + 9) / 10;
    counted = R - excluded;
    cert.excluded_from = counted + 1;
    cert.excluded_count = excluded;
  }

  bool any_determinate = false;
  double min_det = std::numeric_limits<double>::infinity();
  std::size_t arg_det = 0;
  double min_all = std::numeric_limits<double>::infinity();
  std::size_t arg_all = 0;
  for (std::size_t i = 0; i < counted; ++i) {
    const double r = cert.residuals[i];
    if (std::isnan(r)) throw convergence_error("certificate residual is NaN at row " + std::to_string(i + 1));
    if (r < min_all) {
      min_all = r;
      arg_all = i + 1;
    }
    if (std::abs(r) <= cert.allowances[i]) {
      ++cert.indeterminate_rows;
      continue;
    }
    any_determinate = true;
    if (r < min_det) {
      min_det = r;
      arg_det = i + 1;
    }
  }
  cert.min_residual = any_determinate ? min_det : min_all;
  cert.argmin_index = any_determinate ? arg_det : arg_all;
  cert.pass = cert.min_residual >= -options.tolerance;
  return cert;
}

WeightCertificate certify(WeightScheme scheme, const Params& params, const Weights& lambda,
                          const CertificateOptions& options) {
  const auto w = build_weights(scheme, params, lambda);
  return verify_certificate(scheme, params, lambda, w, options);
}

std::string_view to_string(MasterForm f) { return f == MasterForm::M22 ? "M22" : "M27"; }

MasterForm parse_master_form(std::string_view text) {
  if (text == "M22" || text == "m22") return MasterForm::M22;
  if (text == "M27" || text == "m27") return MasterForm::M27;
  throw std::invalid_argument("unknown master form '" + std::string(text) + "'");
}

MasterReport verify_master(MasterForm form, const MasterCheckInput& in, double tolerance) {
  const std::size_t N = in.x.size();
  if (N == 0) throw std::invalid_argument("master check needs N >= 1");
  if (in.a.size() != N || in.b.size() != N || in.w.size() != N) {
    throw std::invalid_argument("master check: a, b, w, x must have equal length");
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (!(in.a[i] > 0.0) || !(in.b[i] > 0.0) || !(in.w[i] > 0.0)) {
      throw std::invalid_argument("master check: a, b, w must be positive");
    }
    if (!(in.x[i] >= 0.0)) throw std::invalid_argument("master check: x must be nonnegative");
  }
  const double p = in.p;
  if (!(p > 0.0)) throw std::invalid_argument("p must be > 0");
  const double e = p - 1.0;

  MasterReport rep;
  rep.form = form;
  rep.N = N;
  rep.p = p;
  CompensatedSum xp;
  for (double v : in.x) xp += pow_nonneg(v, p);

  if (form == MasterForm::M22) {
    // S_n = sum_{k=n}^N b_k x_k, W_n = sum_{k=n}^N w_k; a_n A_n = S_n.
    std::vector<double> S(N);
    std::vector<double> W(N);
    CompensatedSum s;
    CompensatedSum ws;
    for (std::size_t n = N; n >= 1; --n) {
      s += in.b[n - 1] * in.x[n - 1];
      ws += in.w[n - 1];
      S[n - 1] = s.value();
      W[n - 1] = ws.value();
    }
    CompensatedSum lhs;
    lhs += pow_nonneg(in.w[0], e) / pow_nonneg(in.b[0], p) * pow_nonneg(W[0], -e) *
           pow_nonneg(S[0], p);
    for (std::size_t n = 2; n <= N; ++n) {
      const double bracket_term =
          pow_nonneg(in.w[n - 1], e) / pow_nonneg(in.b[n - 1], p) -
          pow_nonneg(in.w[n - 2], e) / pow_nonneg(in.b[n - 2], p);
      lhs += pow_nonneg(W[n - 1], -e) * bracket_term * pow_nonneg(S[n - 1], p);
    }
    rep.lhs = lhs.value();
    rep.rhs = xp.value();
    rep.residual = rep.rhs - rep.lhs;
    rep.pass = rep.residual >= -tolerance;
    return rep;
  }

  if (!(p > 1.0)) throw std::invalid_argument("M27 needs p > 1");
  if (!(in.U_p > 0.0)) throw std::invalid_argument("M27 needs U_p > 0");
  rep.min_row_residual = std::numeric_limits<double>::infinity();
  CompensatedSum wsum;
  for (std::size_t n = 1; n < N; ++n) {
    wsum += in.w[n - 1];
    const double r = in.U_p * pow_nonneg(in.a[n - 1], -p) *
                         (pow_nonneg(in.w[n - 1], e) / pow_nonneg(in.b[n - 1], p) -
                          pow_nonneg(in.w[n], e) / pow_nonneg(in.b[n], p)) -
                     pow_nonneg(wsum.value(), e);
    rep.row_residuals.push_back(r);
    if (r < rep.min_row_residual) {
      rep.min_row_residual = r;
      rep.argmin_row = n;
    }
  }
  if (rep.row_residuals.empty()) rep.min_row_residual = 0.0;
  rep.rows_pass = rep.min_row_residual >= -tolerance;
  CompensatedSum lhs;
  CompensatedSum inner;
  for (std::size_t n = 1; n <= N; ++n) {
    inner += in.b[n - 1] * in.x[n - 1];
    lhs += pow_nonneg(in.a[n - 1] * inner.value(), p);
  }
  rep.lhs = lhs.value();
  rep.rhs = in.U_p * xp.value();
  rep.residual = rep.rhs - rep.lhs;
  rep.implied_evaluated = rep.rows_pass;
  rep.pass = rep.rows_pass && rep.residual >= -tolerance;
  return rep;
}

MasterCheckInput copson_master_input(const Params& params, const Weights& lambda,
                                     std::span<const double> x) {
  const std::size_t N = lambda.size();
  if (x.size() != N) throw std::invalid_argument("length mismatch between lambda and x");
  const double p = params.p;
  const double c = params.c;
  const auto wt = build_weights(WeightScheme::CopsonTail, params, lambda);
  MasterCheckInput in;
  in.p = p;
  in.U_p = std::pow(p / (1.0 - c), p);
  in.x.assign(x.begin(), x.end());
  for (std::size_t n = 1; n <= N; ++n) {
    const double l = lambda.lambda(n);
    const double L = lambda.prefix(n);
    in.a.push_back(power_product({{l, -1.0 / p}, {L, c / p}}));
    in.b.push_back(power_product({{l, 1.0 - 1.0 / p}, {L, -(1.0 - c / p)}}));
    in.w.push_back(l * wt[n - 1]);
  }
  return in;
}

MasterCheckInput bg_master_input(const Params& params, const Weights& lambda,
                                 std::span<const double> x) {
  const std::size_t N = lambda.size();
  if (x.size() != N) throw std::invalid_argument("length mismatch between lambda and x");
  const double p = params.p;
  const double alpha = params.alpha_or_throw();
  if (!(alpha > 0.0)) throw std::invalid_argument("BG reduction needs alpha > 0");
  const auto wt = build_weights(WeightScheme::Bg, params, lambda);
  MasterCheckInput in;
  in.p = p;
  in.U_p = std::pow(alpha * p / (p - 1.0), p);
  in.x.assign(x.begin(), x.end());
  for (std::size_t n = 1; n <= N; ++n) {
    const double l = lambda.lambda(n);
    const double xn = l / lambda.prefix(n);
    // (Lam_n^a - Lam_{n-1}^a)/Lam_n^a = 1 - (1 - x)^a
    in.a.push_back(one_minus_pow_complement(xn, alpha) / pow_nonneg(l, 1.0 - 1.0 / p));
    in.b.push_back(pow_nonneg(l, 1.0 - 1.0 / p));
    in.w.push_back(l * wt[n - 1]);
  }
  return in;
}

}  // namespace copson
