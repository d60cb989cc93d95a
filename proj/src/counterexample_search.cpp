#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "copson/numeric.hpp"
#include "copson/parallel.hpp"
#include "copson/sharpness.hpp"

namespace copson {

namespace {

/*!
  One side of an inequality in the shape
      sum_n W_n (sum_{k<=n or k>=n} a_k x_k)^p     (accumulated)
  or  sum_n W_n (a_n x_n)^p                        (pointwise).
  With x supported on a few positions the inner sum is piecewise constant,
  so the side costs O(support) given prefix sums of W.
*/
struct SparseSide {
  enum class Shape { Forward, Backward, Pointwise } shape = Shape::Pointwise;
  std::vector<double> coef;         // a_n
  std::vector<double> weight;       // W_n
  std::vector<double> weight_sums;  // sum_{i<=n} W_i, n = 0..N

  void finish() {
    weight_sums.assign(weight.size() + 1, 0.0);
    CompensatedSum s;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      s += weight[i];
      weight_sums[i + 1] = s.value();
    }
  }

  [[nodiscard]] double segment(std::size_t first, std::size_t last) const {
    return weight_sums[last] - weight_sums[first - 1];
  }

  // positions sorted ascending, 1-based
  [[nodiscard]] double eval(const std::vector<std::size_t>& pos, const std::vector<double>& val,
                            double p) const {
    const std::size_t N = weight.size();
    const std::size_t s = pos.size();
    CompensatedSum out;
    switch (shape) {
      case Shape::Pointwise:
        for (std::size_t j = 0; j < s; ++j) {
          out += weight[pos[j] - 1] * pow_nonneg(coef[pos[j] - 1] * val[j], p);
        }
        break;
      case Shape::Forward: {
        double inner = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
          inner += coef[pos[j] - 1] * val[j];
          const std::size_t last = j + 1 < s ? pos[j + 1] - 1 : N;
          out += pow_nonneg(inner, p) * segment(pos[j], last);
        }
        break;
      }
      case Shape::Backward: {
        double inner = 0.0;
        for (std::size_t j = s; j-- > 0;) {
          inner += coef[pos[j] - 1] * val[j];
          const std::size_t first = j > 0 ? pos[j - 1] + 1 : 1;
          out += pow_nonneg(inner, p) * segment(first, pos[j]);
        }
        break;
      }
    }
    return out.value();
  }
};

struct SparseModel {
  SparseSide lhs;
  SparseSide rhs;
  double constant = 1.0;
  double p = 2.0;
  bool reverse = false;

  // Ratio whose excess over 1 is a violation.
  [[nodiscard]] double ratio(const std::vector<std::size_t>& pos,
                             const std::vector<double>& val) const {
    const double l = lhs.eval(pos, val, p);
    const double r = constant * rhs.eval(pos, val, p);
    if (reverse) return l > 0.0 ? r / l : 0.0;
    return r > 0.0 ? l / r : 0.0;
  }
};

SparseModel build_model(Family family, const Params& params, const Weights& lambda) {
  using Shape = SparseSide::Shape;
  const std::size_t N = lambda.size();
  const double p = params.p;
  const double c = params.c;
  const double alpha = uses_alpha(family) ? *params.alpha : 0.0;
  SparseModel m;
  m.p = p;
  m.reverse = params.reverse;
  m.constant = family_constant(family, params);
  for (SparseSide* side : {&m.lhs, &m.rhs}) {
    side->coef.assign(N, 1.0);
    side->weight.assign(N, 0.0);
  }
  const bool i34_tail = params.i34_direction == I34Direction::Tail;
  switch (family) {
    case Family::C1:
    case Family::L1: m.lhs.shape = Shape::Forward; break;
    case Family::C2:
    case Family::L2: m.lhs.shape = Shape::Backward; break;
    case Family::BG:
      m.lhs.shape = Shape::Backward;
      m.rhs.shape = Shape::Backward;
      break;
    case Family::BGA:
      m.lhs.shape = Shape::Forward;
      m.rhs.shape = Shape::Forward;
      break;
    case Family::I34: m.lhs.shape = i34_tail ? Shape::Forward : Shape::Backward; break;
  }
  for (std::size_t n = 1; n <= N; ++n) {
    const double lam = lambda.lambda(n);
    const double big = lambda.prefix(n);
    const double st = lambda.summable() ? lambda.tail(n) : 0.0;
    const std::size_t i = n - 1;
    switch (family) {
      case Family::C1:
      case Family::C2:
        m.lhs.coef[i] = lam;
        m.lhs.weight[i] = power_product({{lam, 1.0}, {big, -c}});
        m.rhs.weight[i] = power_product({{lam, 1.0}, {big, p - c}});
        break;
      case Family::L1:
      case Family::L2:
        m.lhs.coef[i] = lam;
        m.lhs.weight[i] = power_product({{lam, 1.0}, {st, -c}});
        m.rhs.weight[i] = power_product({{lam, 1.0}, {st, p - c}});
        break;
      case Family::BG:
        m.lhs.coef[i] = pow_nonneg(big, alpha);
        m.lhs.weight[i] = lam;
        m.rhs.weight[i] = power_product({{lam, 1.0}, {big, alpha * p}});
        break;
      case Family::BGA:
        m.lhs.coef[i] = pow_nonneg(st, alpha);
        m.lhs.weight[i] = lam;
        m.rhs.weight[i] = power_product({{lam, 1.0}, {st, alpha * p}});
        break;
      case Family::I34: {
        const double base = i34_tail ? st : big;
        m.lhs.coef[i] = pow_nonneg(base, alpha) * one_minus_pow_complement(lam / base, alpha);
        m.lhs.weight[i] = lam;
        m.rhs.weight[i] = power_product({{lam, 1.0}, {base, alpha * p}});
        break;
      }
    }
  }
  m.lhs.finish();
  m.rhs.finish();
  return m;
}

struct Candidate {
  double ratio = 0.0;
  std::vector<std::size_t> pos;
  std::vector<double> val;
  std::size_t evaluations = 0;
};

void sort_support(std::vector<std::size_t>& pos, std::vector<double>& val) {
  std::vector<std::size_t> order(pos.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pos[a] < pos[b]; });
  std::vector<std::size_t> p2;
  std::vector<double> v2;
  for (std::size_t i : order) {
    p2.push_back(pos[i]);
    v2.push_back(val[i]);
  }
  pos = std::move(p2);
  val = std::move(v2);
}

// One restart: a random support (half near the start, half log-uniform over
// [1, N]) and random log-uniform values, then coordinate ascent with
// per-coordinate multiplicative steps that halve on failure.
Candidate restart(const SparseModel& model, std::size_t N, std::size_t max_support,
                  std::size_t evals, std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t cap = std::min(max_support, N);
  const std::size_t size = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(cap));
  std::vector<std::size_t> pos;
  const double logN = std::log(static_cast<double>(N));
  while (pos.size() < std::min(size, cap)) {
    std::size_t k;
    if (unit(rng) < 0.5) {
      k = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(std::min<std::size_t>(N, 64)));
    } else {
      k = static_cast<std::size_t>(std::exp(unit(rng) * logN));
    }
    k = std::clamp<std::size_t>(k, 1, N);
    if (std::find(pos.begin(), pos.end(), k) == pos.end()) pos.push_back(k);
  }
  std::vector<double> val(pos.size());
  for (double& v : val) v = std::exp(-6.0 * unit(rng));
  sort_support(pos, val);

  Candidate best;
  best.pos = pos;
  best.val = val;
  best.ratio = model.ratio(pos, val);
  best.evaluations = 1;
  std::vector<double> step(pos.size(), 1.0);
  std::size_t j = 0;
  while (best.evaluations < evals) {
    bool improved = false;
    for (double dir : {1.0, -1.0}) {
      if (best.evaluations >= evals) break;
      std::vector<double> trial = best.val;
      trial[j] *= std::exp(dir * step[j]);
      const double r = model.ratio(best.pos, trial);
      ++best.evaluations;
      if (r > best.ratio) {
        best.ratio = r;
        best.val = std::move(trial);
        improved = true;
        step[j] *= 1.5;
        break;
      }
    }
    if (!improved) step[j] = std::max(step[j] * 0.5, 1e-8);
    j = (j + 1) % best.pos.size();
  }
  return best;
}

}  // namespace

SearchResult counterexample_search(Family family, const Params& params, std::size_t budget,
                                   std::uint64_t seed, const SearchOptions& options) {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (options.N < 1) throw std::invalid_argument("N must be >= 1");
  if (options.max_support < 1) throw std::invalid_argument("support size must be >= 1");
  validate(family, params);
  validate(options.lambda);
  if (uses_tail_sums(family) && !summable(options.lambda)) {
    throw std::invalid_argument(std::string(to_string(family)) + " needs summable weights");
  }
  const std::size_t N = representable_length(options.lambda, options.N);
  const Weights lambda = make_weights(options.lambda, N);
  const SparseModel model = build_model(family, params, lambda);

  SearchResult res;
  res.family = family;
  res.params = params;
  res.lambda_spec = to_string(options.lambda);
  res.N = N;
  res.seed = seed;
  res.budget = budget;

  // phase 1: every single support, where the ratio does not depend on the value
  Candidate best;
  for (std::size_t m = 1; m <= N; ++m) {
    const double r = model.ratio({m}, {1.0});
    if (r > best.ratio) {
      best.ratio = r;
      best.pos = {m};
      best.val = {1.0};
    }
  }
  res.single_support_best = best.ratio;
  res.single_support_position = best.pos.empty() ? 0 : best.pos.front();
  res.evaluations = N;

  // phase 2: restarts, merged in index order so --jobs never changes the result
  constexpr std::size_t kEvalsPerRestart = 256;
  res.restarts = std::max<std::size_t>(1, budget / kEvalsPerRestart);
  const auto found = parallel_map(res.restarts, options.jobs, [&](std::size_t i) {
    const std::size_t share = budget / res.restarts + (i < budget % res.restarts ? 1 : 0);
    return restart(model, N, options.max_support, std::max<std::size_t>(share, 1), seed, i);
  });
  for (const auto& cand : found) {
    res.evaluations += cand.evaluations;
    if (cand.ratio > best.ratio) best = cand;
  }

  res.best_ratio = best.ratio;
  res.positions = best.pos;
  res.values = best.val;

  // a claim must clear the dense evaluator's budget, then survive doubling N
  if (!best.pos.empty() && best.ratio > 1.0 + options.tolerance) {
    std::vector<double> x(N, 0.0);
    for (std::size_t i = 0; i < best.pos.size(); ++i) x[best.pos[i] - 1] = best.val[i];
    const TruncationReport dense = eval_inequality(family, params, lambda, x);
    const double scale = params.reverse ? dense.lhs : dense.rhs;
    const double relative_budget = scale > 0.0 ? dense.error_budget / scale : 0.0;
    if (best.ratio > 1.0 + std::max(10.0 * relative_budget, options.tolerance)) {
      res.claimed = true;
      const std::size_t N2 = representable_length(options.lambda, 2 * options.N);
      const Weights lambda2 = make_weights(options.lambda, N2);
      x.resize(N2, 0.0);
      res.reverify_verdict = eval_inequality(family, params, lambda2, x).verdict;
    }
  }
  return res;
}

}  // namespace copson
