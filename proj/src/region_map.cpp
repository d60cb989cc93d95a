#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "copson/parallel.hpp"
#include "copson/scalar_core.hpp"
#include "copson/sharpness.hpp"

namespace copson {

std::string_view to_string(RegionMode m) { return m == RegionMode::PC ? "pc" : "pa"; }

RegionMode parse_region_mode(std::string_view text) {
  if (text == "pc" || text == "PC") return RegionMode::PC;
  if (text == "pa" || text == "PA") return RegionMode::PA;
  throw std::invalid_argument("unknown region mode '" + std::string(text) + "'");
}

std::vector<double> Range::values() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step)) {
    throw std::invalid_argument("range bounds must be finite");
  }
  if (!(step > 0.0)) throw std::invalid_argument("range step must be > 0");
  if (hi < lo) throw std::invalid_argument("empty range (hi < lo)");
  const double span = (hi - lo) / step;
  if (span > 1e6) throw std::invalid_argument("range has too many points");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    double v = lo + static_cast<double>(i) * step;
    if (std::abs(v) < 1e-12 * step) v = 0.0;
    if (std::abs(v - hi) < 1e-9 * step) v = hi;
    // drop accumulated drift so -0.2 prints as -0.2
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out[i] = std::strtod(buf, nullptr);
  }
  return out;
}

Range parse_range(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (first == std::string_view::npos || second == std::string_view::npos ||
      text.find(':', second + 1) != std::string_view::npos) {
    throw std::invalid_argument("range must be LO:HI:STEP, got '" + std::string(text) + "'");
  }
  Range r;
  r.lo = parse_double(text.substr(0, first));
  r.hi = parse_double(text.substr(first + 1, second - first - 1));
  r.step = parse_double(text.substr(second + 1));
  (void)r.values();
  return r;
}

std::string_view to_string(CellClass c) {
  switch (c) {
    case CellClass::Sufficient: return "SUFFICIENT";
    case CellClass::HoldsOnBattery: return "HOLDS-ON-BATTERY";
    case CellClass::CertFailNoCounterexample: return "CERT_FAIL-NO-COUNTEREXAMPLE";
    case CellClass::Fails: return "FAILS";
    case CellClass::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::vector<SequenceSpec> weight_battery(bool summable_only) {
  std::vector<SequenceSpec> out;
  if (!summable_only) out.emplace_back(seq::Const{1.0});
  out.emplace_back(seq::Geom{0.5, 1.0});
  out.emplace_back(seq::Pow{-2.0});
  return out;
}

std::vector<SequenceSpec> test_battery() {
  return {seq::Unit{1}, seq::Unit{3}, seq::Pow{-2.0}, seq::Geom{1.0 / 3.0, 1.0}};
}

std::optional<WeightScheme> scheme_for(Family f) {
  switch (f) {
    case Family::C2: return WeightScheme::CopsonTail;
    case Family::L1: return WeightScheme::Leindler;
    case Family::BG: return WeightScheme::Bg;
    case Family::BGA: return WeightScheme::Bga;
    default: return std::nullopt;
  }
}

namespace {

struct BatteryOutcome {
  Verdict verdict = Verdict::Holds;
  double min_margin = std::numeric_limits<double>::infinity();
};

BatteryOutcome run_battery(Family family, const Params& params, std::size_t N) {
  BatteryOutcome out;
  bool inconclusive = false;
  bool fails = false;
  for (const auto& lspec : weight_battery(uses_tail_sums(family))) {
    const std::size_t n = representable_length(lspec, N);
    const Weights lambda = make_weights(lspec, n);
    for (const auto& xspec : test_battery()) {
      if (const auto* u = std::get_if<seq::Unit>(&xspec); u && u->position > n) continue;
      const auto x = materialize(xspec, n);
      const TruncationReport rep = eval_inequality(family, params, lambda, x);
      const double margin = params.reverse ? rep.ratio - 1.0 : 1.0 - rep.ratio;
      out.min_margin = std::min(out.min_margin, margin);
      if (rep.verdict == Verdict::Inconclusive) inconclusive = true;
      if (rep.verdict == Verdict::Fails) {
        // a violation only counts if it survives doubling the truncation
        const std::size_t n2 = representable_length(lspec, 2 * N);
        const Weights lambda2 = make_weights(lspec, n2);
        std::vector<double> x2(n2, 0.0);
        std::copy(x.begin(), x.end(), x2.begin());
        if (eval_inequality(family, params, lambda2, x2).verdict == Verdict::Fails) {
          fails = true;
        } else {
          inconclusive = true;
        }
      }
    }
  }
  out.verdict = fails ? Verdict::Fails : (inconclusive ? Verdict::Inconclusive : Verdict::Holds);
  return out;
}

}  // namespace

RegionMap region_map(const RegionOptions& options) {
  if (options.N < 3) throw std::invalid_argument("region maps need N >= 3");
  RegionMap map;
  map.mode = options.mode;
  map.N = options.N;
  map.family = options.family.value_or(options.mode == RegionMode::PC ? Family::C2 : Family::BG);
  const bool pc_family = map.family == Family::C2 || map.family == Family::L1;
  if (options.mode == RegionMode::PC ? !pc_family
                                     : !(map.family == Family::BG || map.family == Family::BGA)) {
    throw std::invalid_argument("family " + std::string(to_string(map.family)) +
                                " does not belong to region mode " +
                                std::string(to_string(options.mode)));
  }
  const auto ps = options.p_range.values();
  const auto seconds = options.second_range.values();

  for (double p : ps) {
    OverlayPoint pt;
    pt.p = p;
    if (options.mode == RegionMode::PC) {
      const C0Solution s = solve_c0(p);
      pt.value = s.c0;
      pt.degenerate = s.degenerate;
    } else {
      pt.value = 1.0 - 1.0 / (2.0 * p);
    }
    map.overlay.push_back(pt);
  }

  const std::size_t cols = seconds.size();
  map.cells = parallel_map(ps.size() * cols, options.jobs, [&](std::size_t idx) {
    RegionCell cell;
    cell.p = ps[idx / cols];
    cell.second = seconds[idx % cols];
    Params params;
    params.p = cell.p;
    if (options.mode == RegionMode::PC) {
      params.c = cell.second;
      params.reverse = cell.p < 1.0;
    } else {
      params.alpha = cell.second;
    }

    const auto scheme = scheme_for(map.family);
    const bool certificate_applies = scheme && cell.p > 1.0 && !params.reverse &&
                                     (options.mode == RegionMode::PC ? params.c < 1.0
                                                                     : cell.second > 0.0);
    cell.cert_verdict = "N/A";
    if (certificate_applies) {
      bool pass = true;
      CertificateOptions copt;
      copt.tolerance = options.tolerance;
      for (const auto& lspec : weight_battery(uses_tail_sums(map.family))) {
        const Weights lambda = make_weights(lspec, representable_length(lspec, options.N));
        if (!certify(*scheme, params, lambda, copt).pass) {
          pass = false;
          break;
        }
      }
      cell.cert_verdict = pass ? "CERT_PASS" : "CERT_FAIL";
    }

    const BatteryOutcome battery = run_battery(map.family, params, options.N);
    cell.battery_verdict = battery.verdict;
    cell.min_margin = battery.min_margin;
    if (battery.verdict == Verdict::Fails) {
      cell.cls = CellClass::Fails;
    } else if (cell.cert_verdict == "CERT_PASS") {
      cell.cls = CellClass::Sufficient;
    } else if (cell.cert_verdict == "CERT_FAIL") {
      cell.cls = CellClass::CertFailNoCounterexample;
    } else if (battery.verdict == Verdict::Holds) {
      cell.cls = CellClass::HoldsOnBattery;
    } else {
      cell.cls = CellClass::Inconclusive;
    }
    return cell;
  });
  return map;
}

}  // namespace copson
