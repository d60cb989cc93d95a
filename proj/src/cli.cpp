#include "copson/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "copson/errors.hpp"
#include "copson/serialize.hpp"

namespace copson::cli {

namespace {

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string family;
  double p = 2.0;
  double c = 0.0;
  double alpha = 1.0;
  bool reverse = false;
  std::string i34 = "tail";
  std::string lambda = "const:1";
  std::string x = "unit:1";
  std::size_t N = 100000;
  std::string eps = "1,0.5,0.2,0.1";
  std::size_t grid = 4096;
  double tol_scalar = 1e-12;
  double tol_series = 1e-9;
  double tol_norm = 1e-13;
  std::string scheme;
  std::string cond;
  std::string fn;
  double at = 1.0;
  std::string mode = "pc";
  std::string p_range;
  std::string second_range;
  std::size_t budget = 10000;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::size_t max_support = 32;
  int max_iter = 10000;
  double decay = 2.0;
  std::string form = "M22";
  bool random = false;
  bool residuals = false;
  bool include_tail = false;
  std::string format = "json";
  std::string region_format = "csv";
  std::string out;
  std::string config;
  bool timestamps = false;

  const CLI::Option* alpha_opt = nullptr;
  const CLI::Option* family_opt = nullptr;
  CLI::Option* x_opt = nullptr;
};

// options that take no value
const std::set<std::string> kFlags{"reverse", "timestamps", "residuals", "include-tail", "random"};

const std::vector<std::string> kFamilies{"C1", "C2", "L1", "L2", "BG", "BGA", "I34"};

void add_common(CLI::App* cmd, Flags& f, bool csv_default = false) {
  if (csv_default) {
    cmd->add_option("--format", f.region_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
  } else {
    cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  }
  cmd->add_option("--out", f.out, "write the document to PATH instead of stdout");
  cmd->add_option("--config", f.config, "flat key=value file; command-line flags win");
  cmd->add_flag("--timestamps", f.timestamps, "add a generated_at field");
}

void add_exponents(CLI::App* cmd, Flags& f, bool with_reverse = true) {
  cmd->add_option("--p", f.p, "exponent p");
  cmd->add_option("--c", f.c, "exponent c");
  cmd->add_option("--alpha", f.alpha, "exponent alpha (BG, BGA, I34)");
  if (with_reverse) cmd->add_flag("--reverse", f.reverse, "reversed inequality (0 < p < 1)");
}

Params params_from(const Flags& f) {
  Params P;
  P.p = f.p;
  P.c = f.c;
  if (f.alpha_opt != nullptr && f.alpha_opt->count() > 0) P.alpha = f.alpha;
  P.reverse = f.reverse;
  P.i34_direction = f.i34 == "forward" ? I34Direction::Forward : I34Direction::Tail;
  return P;
}

SpecContext context_from(const Flags& f) { return SpecContext{f.p, f.c, f.alpha}; }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty entry in list '" + text + "'");
    out.push_back(parse_double(item));
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw data_error("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw data_error("write to '" + path + "' failed");
}

void emit(const std::string& text, const Flags& f, std::ostream& out) {
  if (f.out.empty()) {
    out << text;
  } else {
    write_text(f.out, text);
  }
}

void emit_json(Json j, const Flags& f, std::ostream& out) {
  if (f.timestamps) j["generated_at"] = utc_now();
  emit(f.format == "csv" ? flat_csv(j) : dump_json(j), f, out);
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::Holds: return kOk;
    case Verdict::Fails: return kFail;
    case Verdict::Inconclusive: return kInconclusive;
  }
  return kInconclusive;
}

// ---- commands --------------------------------------------------------------

int cmd_verify(const Flags& f, std::ostream& out) {
  const Family family = parse_family(f.family);
  const Params P = params_from(f);
  validate(family, P);
  const SequenceSpec lam = parse_sequence_spec(f.lambda, context_from(f), SequenceRole::Weights);
  const SequenceSpec xs = parse_sequence_spec(f.x, context_from(f), SequenceRole::TestSequence);
  const std::size_t N = representable_length(lam, f.N);
  const Weights W = make_weights(lam, N);
  const std::vector<double> x = materialize(xs, N);
  const TruncationReport r = eval_inequality(family, P, W, x);
  Json j = to_json(r);
  j["lambda"] = to_string(lam);
  j["x"] = to_string(xs);
  emit_json(std::move(j), f, out);
  return verdict_code(r.verdict);
}

int cmd_c0(const Flags& f, std::ostream& out) {
  const C0Solution s = solve_c0(f.p, f.tol_scalar);
  emit_json(to_json(f.p, s), f, out);
  return kOk;
}

int cmd_lemma(const Flags& f, std::ostream& out) {
  const Params P = params_from(f);
  if (!f.fn.empty()) {
    const ScalarFn fn = parse_scalar_fn(f.fn);
    Json j;
    j["fn"] = std::string(to_string(fn));
    j["p"] = P.p;
    j["c"] = P.c;
    j["alpha"] = P.alpha ? Json(*P.alpha) : Json(nullptr);
    j["x"] = f.at;
    j["value"] = scalar_eval(fn, P, f.at);
    emit_json(std::move(j), f, out);
    return kOk;
  }
  if (f.cond.empty()) throw usage_error("lemma needs --cond (or --fn with --at)");
  const ScalarCheck check = check_condition(parse_condition(f.cond), P, f.grid, f.tol_scalar);
  emit_json(to_json(check), f, out);
  return check.pass ? kOk : kFail;
}

int cmd_weights(const Flags& f, std::ostream& out) {
  const WeightScheme scheme = parse_scheme(f.scheme);
  const Params P = params_from(f);
  const SequenceSpec lam = parse_sequence_spec(f.lambda, context_from(f), SequenceRole::Weights);
  const std::size_t N = representable_length(lam, f.N);
  const Weights W = make_weights(lam, N);
  CertificateOptions opts;
  opts.tolerance = f.tol_series;
  opts.include_tail_rows = f.include_tail;
  const WeightCertificate cert = certify(scheme, P, W, opts);
  Json j = to_json(cert, f.residuals);
  j["lambda"] = to_string(lam);
  emit_json(std::move(j), f, out);
  return cert.pass ? kOk : kFail;
}

MasterCheckInput random_master_input(const Flags& f) {
  if (f.N < 1) throw std::invalid_argument("N must be >= 1");
  std::mt19937_64 rng(f.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MasterCheckInput in;
  in.p = f.p;
  in.U_p = std::pow(f.p / (f.p - 1.0), f.p);
  for (auto* v : {&in.a, &in.b, &in.w, &in.x}) v->resize(f.N);
  for (std::size_t i = 0; i < f.N; ++i) {
    in.a[i] = std::exp(-4.0 * unit(rng));
    in.b[i] = std::exp(-4.0 * unit(rng));
    in.w[i] = std::exp(-4.0 * unit(rng));
    in.x[i] = unit(rng);
  }
  return in;
}

int cmd_master(const Flags& f, std::ostream& out) {
  const MasterForm form = parse_master_form(f.form);
  MasterCheckInput in;
  Json extra;
  if (f.random) {
    if (form == MasterForm::M27 && !(f.p > 1.0)) throw std::invalid_argument("M27 needs p > 1");
    in = random_master_input(f);
    extra["source"] = "random";
    extra["seed"] = f.seed;
  } else {
    const Params P = params_from(f);
    const SequenceSpec lam = parse_sequence_spec(f.lambda, context_from(f), SequenceRole::Weights);
    const SequenceSpec xs = parse_sequence_spec(f.x, context_from(f), SequenceRole::TestSequence);
    const std::size_t N = representable_length(lam, f.N);
    const Weights W = make_weights(lam, N);
    const std::vector<double> x = materialize(xs, N);
    in = form == MasterForm::M22 ? copson_master_input(P, W, x) : bg_master_input(P, W, x);
    extra["source"] = form == MasterForm::M22 ? "copson" : "bg";
    extra["lambda"] = to_string(lam);
    extra["x"] = to_string(xs);
  }
  const MasterReport rep = verify_master(form, in, f.tol_series);
  Json j = to_json(rep);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  emit_json(std::move(j), f, out);
  return rep.pass ? kOk : kFail;
}

int cmd_ratio_scan(const Flags& f, std::ostream& out) {
  const Family family = parse_family(f.family);
  const Params P = params_from(f);
  RatioScanOptions opts;
  opts.N = f.N;
  opts.decay = f.decay;
  opts.jobs = f.jobs;
  if (f.x_opt->count() > 0) {
    opts.x_override = parse_sequence_spec(f.x, context_from(f), SequenceRole::TestSequence);
  }
  const RatioScan scan = ratio_scan(family, P, parse_list(f.eps), opts);
  if (f.format == "csv") {
    std::ostringstream os;
    os << "eps,N,ratio,finite_ratio,normalized_ratio,budget,conclusive\n";
    for (const auto& e : scan.entries) {
      os << format_double(e.eps) << ',' << e.N << ',' << format_double(e.ratio) << ','
         << format_double(e.finite_ratio) << ',' << format_double(e.normalized_ratio) << ','
         << format_double(e.budget) << ',' << (e.conclusive ? "true" : "false") << '\n';
    }
    emit(os.str(), f, out);
  } else {
    emit_json(to_json(scan), f, out);
  }
  const bool conclusive = std::all_of(scan.entries.begin(), scan.entries.end(),
                                      [](const RatioEntry& e) { return e.conclusive; });
  if (!conclusive) return kInconclusive;
  if (!scan.below_target) return kFail;
  return scan.monotone ? kOk : kInconclusive;
}

int cmd_norm(const Flags& f, std::ostream& out, std::ostream& err) {
  const DualForm form = parse_dual_form(f.family);
  const Params P = params_from(f);
  const SequenceSpec lam = parse_sequence_spec(f.lambda, context_from(f), SequenceRole::Weights);
  const std::size_t N = representable_length(lam, f.N);
  const Weights W = make_weights(lam, N);
  const NormEstimate est = norm_estimate(form, P, W, f.tol_norm, f.max_iter);
  Json j = to_json(est);
  j["lambda"] = to_string(lam);
  emit_json(std::move(j), f, out);
  if (!est.converged) {
    err << "copsonlab: numeric failure: power iteration did not converge (last relative gap "
        << format_double(est.last_gap) << ")\n";
    return kNumericFailure;
  }
  return est.value <= est.bound * (1.0 + 1e-12) ? kOk : kFail;
}

int cmd_region(const Flags& f, std::ostream& out) {
  RegionOptions opts;
  opts.mode = parse_region_mode(f.mode);
  if (f.family_opt->count() > 0) opts.family = parse_family(f.family);
  opts.p_range = parse_range(f.p_range);
  opts.second_range = parse_range(f.second_range);
  opts.N = f.N;
  opts.tolerance = f.tol_series;
  opts.jobs = f.jobs;
  const RegionMap map = region_map(opts);
  if (f.region_format == "csv") {
    emit(region_csv(map), f, out);
    if (!f.out.empty()) {
      Json side = overlay_json(map);
      if (f.timestamps) side["generated_at"] = utc_now();
      write_text(f.out + ".overlays.json", dump_json(side));
    }
  } else {
    Json j = to_json(map);
    if (f.timestamps) j["generated_at"] = utc_now();
    emit(dump_json(j), f, out);
  }
  const bool fails = std::any_of(map.cells.begin(), map.cells.end(),
                                 [](const RegionCell& c) { return c.cls == CellClass::Fails; });
  return fails ? kFail : kOk;
}

int cmd_search(const Flags& f, std::ostream& out) {
  const Family family = parse_family(f.family);
  const Params P = params_from(f);
  SearchOptions opts;
  opts.N = f.N;
  opts.lambda = parse_sequence_spec(f.lambda, context_from(f), SequenceRole::Weights);
  opts.tolerance = f.tol_series;
  opts.jobs = f.jobs;
  opts.max_support = f.max_support;
  const SearchResult res = counterexample_search(family, P, f.budget, f.seed, opts);
  emit_json(to_json(res), f, out);
  if (!res.claimed) return kOk;
  return res.reverify_verdict == Verdict::Fails ? kFail : kInconclusive;
}

// ---- config ----------------------------------------------------------------

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends the config file's settings that argv does not already set.
std::vector<std::string> merge_config(std::vector<std::string> args, CLI::App& app) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  CLI::App* sub = nullptr;
  for (const auto& a : args) {
    if (a.rfind("-", 0) == 0) continue;
    sub = app.get_subcommand_no_throw(a);
    break;
  }
  if (sub == nullptr) return args;

  std::ifstream in(path);
  if (!in) throw data_error("cannot read config file '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::string> settings;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw data_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key.empty() || key == "config") continue;
    const std::string flag = "--" + key;
    bool known = false;
    for (const CLI::App* s : app.get_subcommands({})) {
      known = known || s->get_option_no_throw(flag) != nullptr;
    }
    if (!known) throw usage_error(path + ": unknown key '" + key + "'");
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr || given_on_command_line(args, flag)) continue;
    if (kFlags.count(key) > 0 && !(value == "true" || value == "1" || value == "yes" ||
                                   value == "false" || value == "0" || value == "no")) {
      throw usage_error(path + ": flag '" + key + "' expects true or false");
    }
    settings[key] = value;  // a later line wins
  }
  std::vector<std::string> extra;
  for (const auto& [key, value] : settings) {
    if (kFlags.count(key) > 0) {
      if (value == "true" || value == "1" || value == "yes") extra.push_back("--" + key);
    } else {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Discrete Copson/Leindler inequality lab", "copsonlab"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "evaluate both sides of an inequality family");
  verify->add_option("--family", f.family, "inequality family")
                     ->required()
                     ->check(CLI::IsMember(kFamilies));
  add_exponents(verify, f);
  verify->add_option("--i34", f.i34, "I34 direction")->check(CLI::IsMember({"tail", "forward"}));
  verify->add_option("--lambda", f.lambda, "weight sequence SPEC");
  verify->add_option("--x", f.x, "test sequence SPEC");
  verify->add_option("--N", f.N, "truncation length");
  add_common(verify, f);

  auto* c0 = app.add_subcommand("c0", "solve for the critical exponent c0(p)");
  c0->add_option("--p", f.p, "exponent p");
  c0->add_option("--tol", f.tol_scalar, "residual tolerance");
  add_common(c0, f);

  auto* lemma = app.add_subcommand("lemma", "scan a scalar condition, or evaluate a scalar function");
  lemma->add_option("--cond", f.cond, "LEMMA21 | COND26 | HADAMARD_D1 | HADAMARD_D2 ...");
  lemma->add_option("--fn", f.fn, "evaluate one scalar function at --at instead");
  lemma->add_option("--at", f.at, "point for --fn");
  add_exponents(lemma, f);
  lemma->add_option("--grid", f.grid, "grid size");
  lemma->add_option("--tol", f.tol_scalar, "pass tolerance");
  add_common(lemma, f);

  auto* weights = app.add_subcommand("weights", "build auxiliary weights and certify them");
  weights->add_option("--scheme", f.scheme, "copson-tail | leindler | bg | bga")->required();
  add_exponents(weights, f, false);
  weights->add_option("--lambda", f.lambda, "weight sequence SPEC");
  weights->add_option("--N", f.N, "number of weights");
  weights->add_option("--tol", f.tol_series, "residual tolerance");
  weights->add_flag("--residuals", f.residuals, "include w and every row residual");
  weights->add_flag("--include-tail", f.include_tail, "also check the last tenth of the rows");
  add_common(weights, f);

  auto* master = app.add_subcommand("master", "check a master inequality on recast or random inputs");
  master->add_option("--form", f.form, "M22 | M27")->check(CLI::IsMember({"M22", "M27"}));
  add_exponents(master, f, false);
  master->add_option("--lambda", f.lambda, "weight sequence SPEC");
  master->add_option("--x", f.x, "test sequence SPEC");
  master->add_option("--N", f.N, "length");
  master->add_flag("--random", f.random, "random positive inputs from --seed");
  master->add_option("--seed", f.seed, "seed for --random");
  master->add_option("--tol", f.tol_series, "residual tolerance");
  add_common(master, f);

  auto* scan = app.add_subcommand("ratio-scan", "ratio of the two sides on extremal sequences");
  scan->add_option("--family", f.family, "C1 | C2 | BGA")
      ->required()
      ->check(CLI::IsMember({"C1", "C2", "BGA"}));
  add_exponents(scan, f, false);
  scan->add_option("--eps", f.eps, "comma-separated, strictly decreasing");
  f.x_opt = scan->add_option("--x", f.x, "override the extremal test sequence");
  scan->add_option("--decay", f.decay, "BGA weight decay a in lam_n = n^-a");
  scan->add_option("--N", f.N, "truncation length");
  scan->add_option("--jobs", f.jobs, "worker threads");
  add_common(scan, f);

  auto* norm = app.add_subcommand("norm", "estimate the operator norm of a dual kernel");
  norm->add_option("--family", f.family, "C2_DUAL | BGA_DUAL")
      ->required()
      ->check(CLI::IsMember({"C2_DUAL", "BGA_DUAL"}));
  add_exponents(norm, f, false);
  norm->add_option("--lambda", f.lambda, "weight sequence SPEC");
  norm->add_option("--N", f.N, "matrix size");
  norm->add_option("--tol", f.tol_norm, "relative gap tolerance");
  norm->add_option("--max-iter", f.max_iter, "iteration cap");
  add_common(norm, f);

  auto* region = app.add_subcommand("region", "classify a (p, c) or (p, alpha) grid");
  region->add_option("--mode", f.mode, "pc | pa")->check(CLI::IsMember({"pc", "pa"}));
  region->add_option("--family", f.family, "C2 | L1 (pc), BG | BGA (pa)")
                            ->check(CLI::IsMember(kFamilies));
  region->add_option("--p-range", f.p_range, "LO:HI:STEP")->required();
  region->add_option("--second-range", f.second_range, "LO:HI:STEP over c or alpha")->required();
  region->add_option("--N", f.N, "truncation length");
  region->add_option("--tol", f.tol_series, "certificate tolerance");
  region->add_option("--jobs", f.jobs, "worker threads");
  add_common(region, f, true);

  auto* search = app.add_subcommand("search", "seeded sparse counterexample search");
  search->add_option("--family", f.family, "inequality family")
                            ->required()
                            ->check(CLI::IsMember(kFamilies));
  add_exponents(search, f);
  search->add_option("--lambda", f.lambda, "weight sequence SPEC");
  search->add_option("--N", f.N, "truncation length");
  search->add_option("--budget", f.budget, "objective evaluations");
  search->add_option("--seed", f.seed, "random seed");
  search->add_option("--max-support", f.max_support, "largest support tried");
  search->add_option("--tol", f.tol_series, "claim tolerance");
  search->add_option("--jobs", f.jobs, "worker threads");
  add_common(search, f);

  try {
    std::vector<std::string> argv = merge_config(args, app);
    std::reverse(argv.begin(), argv.end());
    try {
      app.parse(argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e, out, err) == 0 ? kOk : kUsage;
      err << "copsonlab: usage: " << e.what() << '\n';
      return kUsage;
    }
    if (f.jobs < 1) throw usage_error("--jobs must be >= 1");
    // which optional flags were actually given is read off the active command
    const CLI::App* active = app.get_subcommands().front();
    f.alpha_opt = active->get_option_no_throw("--alpha");
    f.family_opt = active->get_option_no_throw("--family");

    if (verify->parsed()) return cmd_verify(f, out);
    if (c0->parsed()) return cmd_c0(f, out);
    if (lemma->parsed()) return cmd_lemma(f, out);
    if (weights->parsed()) return cmd_weights(f, out);
    if (master->parsed()) return cmd_master(f, out);
    if (scan->parsed()) return cmd_ratio_scan(f, out);
    if (norm->parsed()) return cmd_norm(f, out, err);
    if (region->parsed()) return cmd_region(f, out);
    if (search->parsed()) return cmd_search(f, out);
    throw usage_error("no command");
  } catch (const usage_error& e) {
    err << "copsonlab: usage: " << e.what() << '\n';
    return kUsage;
  } catch (const data_error& e) {
    err << "copsonlab: data error: " << e.what() << '\n';
    return kDataError;
  } catch (const convergence_error& e) {
    err << "copsonlab: numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::invalid_argument& e) {
    err << "copsonlab: usage: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "copsonlab: usage: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "copsonlab: numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }
}

}  // namespace copson::cli
