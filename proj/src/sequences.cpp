#include "copson/sequences.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "copson/errors.hpp"

namespace copson {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Interval power_tail(double a, std::size_t N) {
  if (!(a < -1.0)) {
    throw std::invalid_argument("power sequence n^" + std::to_string(a) +
                                " is not summable (exponent must be < -1)");
  }
  if (N == 0) throw std::invalid_argument("tail_bound needs N >= 1 for power sequences");
  // integral test: int_{N+1}^inf x^a dx <= tail <= int_N^inf x^a dx
  const double k = -(a + 1.0);
  const double n = static_cast<double>(N);
  return {std::pow(n + 1.0, a + 1.0) / k, std::pow(n, a + 1.0) / k};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

void validate(const SequenceSpec& spec) {
  std::visit(overloaded{
                 [](const seq::Const& s) {
                   if (!(s.value > 0.0)) throw std::invalid_argument("const: value must be > 0");
                 },
                 [](const seq::Pow& s) {
                   if (!std::isfinite(s.exponent))
                     throw std::invalid_argument("pow: exponent must be finite");
                 },
                 [](const seq::Geom& s) {
                   if (!(s.ratio > 0.0 && s.ratio < 1.0))
                     throw std::invalid_argument("geom: ratio must lie in (0, 1)");
                   if (!(s.value > 0.0)) throw std::invalid_argument("geom: value must be > 0");
                 },
                 [](const seq::Unit& s) {
                   if (s.position < 1) throw std::invalid_argument("unit: position must be >= 1");
                 },
                 [](const seq::Explicit& s) {
                   for (double t : s.terms) {
                     if (!(t >= 0.0) || !std::isfinite(t))
                       throw std::invalid_argument("explicit: entries must be finite and nonnegative");
                   }
                 },
                 [](const seq::ExtremalCopson& s) {
                   if (!(s.p > 0.0)) throw std::invalid_argument("extremal-copson: p must be > 0");
                   if (!(s.eps > 0.0)) throw std::invalid_argument("extremal-copson: eps must be > 0");
                 },
                 [](const seq::ExtremalBga& s) {
                   if (!(s.p > 0.0)) throw std::invalid_argument("extremal-bga: p must be > 0");
                   if (!(s.decay > 1.0)) throw std::invalid_argument("extremal-bga: a must be > 1");
                   if (!(s.eps > 0.0)) throw std::invalid_argument("extremal-bga: eps must be > 0");
                 },
             },
             spec);
}

double term(const SequenceSpec& spec, std::size_t n) {
  const double x = static_cast<double>(n);
  return std::visit(overloaded{
                        [](const seq::Const& s) { return s.value; },
                        [x](const seq::Pow& s) { return std::pow(x, s.exponent); },
                        [x](const seq::Geom& s) { return s.value * std::pow(s.ratio, x - 1.0); },
                        [n](const seq::Unit& s) { return n == s.position ? 1.0 : 0.0; },
                        [n](const seq::Explicit& s) {
                          return n <= s.terms.size() ? s.terms[n - 1] : 0.0;
                        },
                        [x](const seq::ExtremalCopson& s) { return std::pow(x, s.exponent()); },
                        [x](const seq::ExtremalBga& s) { return std::pow(x, s.exponent()); },
                    },
                    spec);
}

std::vector<double> materialize(const SequenceSpec& spec, std::size_t N) {
  if (N == 0) throw std::invalid_argument("materialize: N must be >= 1");
  validate(spec);
  if (const auto* u = std::get_if<seq::Unit>(&spec); u && u->position > N) {
    throw std::invalid_argument("unit: position " + std::to_string(u->position) +
                                " exceeds N = " + std::to_string(N));
  }
  if (const auto* e = std::get_if<seq::Explicit>(&spec); e && e->terms.size() < N) {
    throw std::invalid_argument("explicit: list has " + std::to_string(e->terms.size()) +
                                " entries, N = " + std::to_string(N));
  }
  std::vector<double> out(N);
  if (const auto* g = std::get_if<seq::Geom>(&spec)) {
    // repeated multiplication keeps the ratio between neighbours exact
    double t = g->value;
    for (std::size_t n = 0; n < N; ++n) {
      out[n] = t;
      t *= g->ratio;
    }
    return out;
  }
  for (std::size_t n = 1; n <= N; ++n) out[n - 1] = term(spec, n);
  return out;
}

bool summable(const SequenceSpec& spec) {
  return std::visit(overloaded{
                        [](const seq::Const&) { return false; },
                        [](const seq::Pow& s) { return s.exponent < -1.0; },
                        [](const seq::Geom&) { return true; },
                        [](const seq::Unit&) { return true; },
                        [](const seq::Explicit&) { return true; },
                        [](const seq::ExtremalCopson& s) { return s.exponent() < -1.0; },
                        [](const seq::ExtremalBga& s) { return s.exponent() < -1.0; },
                    },
                    spec);
}

Interval tail_bound(const SequenceSpec& spec, std::size_t N) {
  validate(spec);
  return std::visit(
      overloaded{
          [](const seq::Const&) -> Interval {
            throw std::invalid_argument("const sequences are not summable");
          },
          [N](const seq::Pow& s) { return power_tail(s.exponent, N); },
          [N](const seq::Geom& s) {
            const double t = s.value * std::pow(s.ratio, static_cast<double>(N)) / (1.0 - s.ratio);
            return Interval{t, t};
          },
          [N](const seq::Unit& s) {
            const double t = s.position > N ? 1.0 : 0.0;
            return Interval{t, t};
          },
          [N](const seq::Explicit& s) {
            CompensatedSum rest;
            for (std::size_t n = N; n < s.terms.size(); ++n) rest += s.terms[n];
            return Interval{rest.value(), rest.value()};
          },
          [N](const seq::ExtremalCopson& s) { return power_tail(s.exponent(), N); },
          [N](const seq::ExtremalBga& s) { return power_tail(s.exponent(), N); },
      },
      spec);
}

SequenceSpec paired_weights(const seq::ExtremalBga& spec) { return seq::Pow{-spec.decay}; }

std::size_t representable_length(const SequenceSpec& spec, std::size_t N) {
  if (const auto* g = std::get_if<seq::Geom>(&spec)) {
    // past a 1e-30 decay the remaining terms are below rounding of every sum,
    // while powers of the tail sums (and of weights built on them) still fit
    const double steps = std::log(1e-30) / std::log(g->ratio);
    if (steps < 0.0) return 1;
    const double limit = std::floor(steps) + 1.0;
    return limit >= static_cast<double>(N) ? N : static_cast<std::size_t>(limit);
  }
  return N;
}

Weights cumulate(std::span<const double> values, std::optional<Interval> tail_beyond_N) {
  if (values.empty()) throw std::invalid_argument("cumulate: empty weight sequence");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw std::invalid_argument("weights must be finite and positive (lambda_" +
                                  std::to_string(i + 1) + " = " + fmt(values[i]) + ")");
    }
  }
  if (tail_beyond_N) {
    if (tail_beyond_N->hi < tail_beyond_N->lo)
      throw std::invalid_argument("cumulate: tail interval has hi < lo");
    if (tail_beyond_N->lo < 0.0) throw std::invalid_argument("cumulate: negative tail bound");
  }

  Weights w;
  const std::size_t N = values.size();
  w.values_.assign(values.begin(), values.end());
  w.prefix_.resize(N + 1);
  w.suffix_.resize(N + 1);
  w.prefix_[0] = 0.0;
  CompensatedSum forward;
  for (std::size_t n = 0; n < N; ++n) {
    forward += values[n];
    w.prefix_[n + 1] = forward.value();
  }
  w.suffix_[N] = 0.0;
  CompensatedSum backward;
  for (std::size_t n = N; n-- > 0;) {
    backward += values[n];
    w.suffix_[n] = backward.value();
  }
  w.tail_beyond_ = tail_beyond_N;
  w.tail_mid_ = tail_beyond_N ? tail_beyond_N->midpoint() : 0.0;
  return w;
}

Weights make_weights(const SequenceSpec& spec, std::size_t N) {
  const auto values = materialize(spec, N);
  std::optional<Interval> tail;
  if (summable(spec)) tail = tail_bound(spec, N);
  return cumulate(values, tail);
}

namespace {

std::vector<double> read_sequence_file(const std::string& path, SequenceRole role) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open sequence file '" + path + "'");
  std::vector<double> terms;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string_view field(line.data() + first, last - first + 1);
    double v = 0.0;
    try {
      v = parse_double(field);
    } catch (const std::invalid_argument&) {
      throw data_error(path + ":" + std::to_string(lineno) + ": not a number");
    }
    if (role == SequenceRole::Weights ? !(v > 0.0) : !(v >= 0.0)) {
      throw data_error(path + ":" + std::to_string(lineno) +
                       (role == SequenceRole::Weights ? ": weights must be > 0"
                                                      : ": entries must be >= 0"));
    }
    terms.push_back(v);
  }
  if (terms.empty()) throw data_error("sequence file '" + path + "' has no entries");
  return terms;
}

std::size_t parse_position(std::string_view text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a positive integer: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

SequenceSpec parse_sequence_spec(std::string_view text, const SpecContext& ctx, SequenceRole role) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("sequence spec '" + std::string(text) + "' needs KIND:ARGS");
  }
  const auto kind = text.substr(0, colon);
  const auto args = text.substr(colon + 1);

  SequenceSpec spec;
  if (kind == "const") {
    spec = seq::Const{parse_double(args)};
  } else if (kind == "pow") {
    spec = seq::Pow{parse_double(args)};
  } else if (kind == "geom") {
    const auto sep = args.find(':');
    if (sep == std::string_view::npos) {
      spec = seq::Geom{parse_double(args), 1.0};
    } else {
      spec = seq::Geom{parse_double(args.substr(0, sep)), parse_double(args.substr(sep + 1))};
    }
  } else if (kind == "unit") {
    spec = seq::Unit{parse_position(args)};
  } else if (kind == "explicit") {
    std::vector<double> terms;
    std::size_t start = 0;
    while (start <= args.size()) {
      const auto comma = std::min(args.find(',', start), args.size());
      const double v = parse_double(args.substr(start, comma - start));
      if (role == SequenceRole::Weights ? !(v > 0.0) : !(v >= 0.0)) {
        throw std::invalid_argument(role == SequenceRole::Weights ? "explicit: weights must be > 0"
                                                                  : "explicit: entries must be >= 0");
      }
      terms.push_back(v);
      start = comma + 1;
    }
    spec = seq::Explicit{std::move(terms)};
  } else if (kind == "file") {
    spec = seq::Explicit{read_sequence_file(std::string(args), role)};
  } else if (kind == "extremal-copson") {
    spec = seq::ExtremalCopson{ctx.p, ctx.c, parse_double(args)};
  } else if (kind == "extremal-bga") {
    const auto sep = args.find(',');
    if (sep == std::string_view::npos) {
      throw std::invalid_argument("extremal-bga needs A,EPS");
    }
    spec = seq::ExtremalBga{parse_double(args.substr(0, sep)), ctx.alpha, ctx.p,
                            parse_double(args.substr(sep + 1))};
  } else {
    throw std::invalid_argument("unknown sequence kind '" + std::string(kind) + "'");
  }
  validate(spec);
  if (role == SequenceRole::Weights && std::holds_alternative<seq::Unit>(spec)) {
    throw std::invalid_argument("unit sequences have zero terms and cannot be weights");
  }
  return spec;
}

std::string to_string(const SequenceSpec& spec) {
  return std::visit(overloaded{
                        [](const seq::Const& s) { return "const:" + fmt(s.value); },
                        [](const seq::Pow& s) { return "pow:" + fmt(s.exponent); },
                        [](const seq::Geom& s) {
                          return "geom:" + fmt(s.ratio) + ":" + fmt(s.value);
                        },
                        [](const seq::Unit& s) { return "unit:" + std::to_string(s.position); },
                        [](const seq::Explicit& s) {
                          // long lists (files) are summarized by length
                          if (s.terms.size() > 16) {
                            return "explicit[" + std::to_string(s.terms.size()) + " terms]";
                          }
                          std::string out = "explicit:";
                          for (std::size_t i = 0; i < s.terms.size(); ++i) {
                            out += (i ? "," : "") + fmt(s.terms[i]);
                          }
                          return out;
                        },
                        [](const seq::ExtremalCopson& s) { return "extremal-copson:" + fmt(s.eps); },
                        [](const seq::ExtremalBga& s) {
                          return "extremal-bga:" + fmt(s.decay) + "," + fmt(s.eps);
                        },
                    },
                    spec);
}

}  // namespace copson
