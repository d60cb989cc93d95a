#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "copson/numeric.hpp"
#include "copson/sharpness.hpp"

namespace copson {

std::string_view to_string(DualForm f) { return f == DualForm::C2Dual ? "C2_DUAL" : "BGA_DUAL"; }

DualForm parse_dual_form(std::string_view text) {
  if (text == "C2_DUAL" || text == "C2") return DualForm::C2Dual;
  if (text == "BGA_DUAL" || text == "BGA") return DualForm::BgaDual;
  throw std::invalid_argument("unknown dual form '" + std::string(text) + "'");
}

namespace {

double lp_norm(const std::vector<double>& v, double p) {
  CompensatedSum s;
  for (double t : v) s += pow_nonneg(t, p);
  return pow_nonneg(s.value(), 1.0 / p);
}

}  // namespace

NormEstimate norm_estimate(DualForm form, const Params& params, const Weights& lambda, double tol,
                           int max_iter) {
  const double p = params.p;
  if (!(p > 1.0)) throw std::invalid_argument("norm estimation needs p > 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (lambda.size() == 0) throw std::invalid_argument("N must be >= 1");

  NormEstimate est;
  est.form = form;
  est.params = params;
  est.N = lambda.size();
  SeparableKernel kernel;
  if (form == DualForm::C2Dual) {
    if (!(params.c < 1.0)) throw std::invalid_argument("C2_DUAL needs c < 1");
    kernel = c2_recast_kernel(params, lambda);
    est.bound = p / (1.0 - params.c);
  } else {
    kernel = bga_dual_kernel(params, lambda);
    est.bound = params.alpha_or_throw() * p / (p - 1.0);
  }

  const std::size_t N = kernel.size();
  std::vector<double> v(N, pow_nonneg(static_cast<double>(N), -1.0 / p));
  double previous = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> u = kernel.apply(v);
    const double value = lp_norm(u, p);
    est.iterations = it;
    est.value = value;
    if (!(value > 0.0) || !std::isfinite(value)) {
      est.converged = false;
      est.last_gap = std::numeric_limits<double>::infinity();
      return est;
    }
    if (it > 1) {
      est.last_gap = std::abs(value - previous) / value;
      if (est.last_gap < tol) {
        est.converged = true;
        return est;
      }
    }
    previous = value;
    for (double& t : u) t = pow_nonneg(t, p - 1.0);
    v = kernel.apply_transpose(u);
    for (double& t : v) t = pow_nonneg(t, 1.0 / (p - 1.0));
    const double norm = lp_norm(v, p);
    for (double& t : v) t /= norm;
  }
  return est;
}

}  // namespace copson
