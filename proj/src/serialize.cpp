#include "copson/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace copson {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace {

void dump(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        dump(value, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ',';
        dump(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: out += format_double(j.get<double>()); break;
    default: out += j.dump(); break;
  }
}

Json alpha_json(const Params& p) { return p.alpha ? Json(*p.alpha) : Json(nullptr); }

void put_params(Json& j, const Params& p) {
  j["p"] = p.p;
  j["c"] = p.c;
  j["alpha"] = alpha_json(p);
  j["reverse"] = p.reverse;
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, out);
  out += '\n';
  return out;
}

std::string flat_csv(const Json& j) {
  std::string header;
  std::string row;
  for (const auto& [key, value] : j.items()) {
    if (value.is_object() || value.is_array()) continue;
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += key;
    if (value.is_string()) {
      row += value.get<std::string>();
    } else if (value.is_number_float()) {
      const std::string s = format_double(value.get<double>());
      row += s == "null" ? "" : s;
    } else if (value.is_null()) {
      // empty cell
    } else {
      row += value.dump();
    }
  }
  return header + '\n' + row + '\n';
}

Json to_json(const TruncationReport& r) {
  Json j;
  j["family"] = std::string(to_string(r.family));
  put_params(j, r.params);
  if (r.family == Family::I34) {
    j["i34_direction"] = r.params.i34_direction == I34Direction::Tail ? "tail" : "forward";
  }
  j["N"] = r.N;
  j["lhs"] = r.lhs;
  j["rhs_sum"] = r.rhs_sum;
  j["constant"] = r.constant;
  j["rhs"] = r.rhs;
  j["ratio"] = r.ratio;
  j["margin"] = r.margin;
  j["error_budget"] = r.error_budget;
  j["verdict"] = std::string(to_string(r.verdict));
  return j;
}

Json to_json(const ScalarCheck& c) {
  Json j;
  j["condition"] = std::string(to_string(c.condition));
  put_params(j, c.params);
  j["grid"] = c.grid;
  j["min_value"] = c.min_value;
  j["argmin"] = c.argmin;
  j["verdict"] = c.pass ? "PASS" : "FAIL";
  if (c.witness) {
    j["witness"] = Json{{"x", c.witness->x}, {"value", c.witness->value}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

Json to_json(double p, const C0Solution& s) {
  Json j;
  j["p"] = p;
  j["c0"] = s.c0;
  j["residual"] = s.residual;
  j["iterations"] = s.iterations;
  j["degenerate"] = s.degenerate;
  return j;
}

Json to_json(const WeightCertificate& c, bool with_residuals) {
  Json j;
  j["scheme"] = std::string(to_string(c.scheme));
  put_params(j, c.params);
  j["N"] = c.N;
  j["rows"] = c.residuals.size();
  j["min_residual"] = c.min_residual;
  j["argmin_index"] = c.argmin_index;
  j["verdict"] = c.pass ? "CERT_PASS" : "CERT_FAIL";
  if (!c.pass) j["note"] = "sufficient condition failed; the inequality itself is not refuted";
  j["excluded_tail_indices"] =
      c.excluded_count ? Json::array({c.excluded_from, c.excluded_from + c.excluded_count - 1})
                       : Json::array();
  j["indeterminate_rows"] = c.indeterminate_rows;
  if (with_residuals) {
    j["w"] = c.w;
    j["residuals"] = c.residuals;
  }
  return j;
}

Json to_json(const MasterReport& r) {
  Json j;
  j["form"] = std::string(to_string(r.form));
  j["N"] = r.N;
  j["p"] = r.p;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["residual"] = r.residual;
  if (r.form == MasterForm::M27) {
    j["min_row_residual"] = r.min_row_residual;
    j["argmin_row"] = r.argmin_row;
    j["rows_pass"] = r.rows_pass;
    j["implied_evaluated"] = r.implied_evaluated;
  }
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  return j;
}

Json to_json(const RatioScan& s) {
  Json j;
  j["family"] = std::string(to_string(s.family));
  put_params(j, s.params);
  j["lambda"] = s.lambda_spec;
  j["x"] = s.x_spec;
  j["target"] = s.target;
  Json entries = Json::array();
  for (const auto& e : s.entries) {
    Json row;
    row["eps"] = e.eps;
    row["N"] = e.N;
    row["ratio"] = e.ratio;
    row["finite_ratio"] = e.finite_ratio;
    row["normalized_ratio"] = e.normalized_ratio;
    row["budget"] = e.budget;
    row["conclusive"] = e.conclusive;
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  j["monotone"] = s.monotone;
  j["below_target"] = s.below_target;
  return j;
}

Json to_json(const NormEstimate& n) {
  Json j;
  j["form"] = std::string(to_string(n.form));
  put_params(j, n.params);
  j["N"] = n.N;
  j["value"] = n.value;
  j["bound"] = n.bound;
  j["iterations"] = n.iterations;
  j["converged"] = n.converged;
  j["last_gap"] = n.last_gap;
  return j;
}

Json to_json(const SearchResult& r) {
  Json j;
  j["family"] = std::string(to_string(r.family));
  put_params(j, r.params);
  j["lambda"] = r.lambda_spec;
  j["N"] = r.N;
  j["seed"] = r.seed;
  j["budget"] = r.budget;
  j["best_ratio"] = r.best_ratio;
  j["witness"] = Json{{"positions", r.positions}, {"values", r.values}};
  j["single_support"] =
      Json{{"position", r.single_support_position}, {"ratio", r.single_support_best}};
  j["evaluations"] = r.evaluations;
  j["restarts"] = r.restarts;
  j["claimed"] = r.claimed;
  j["reverify_verdict"] =
      r.reverify_verdict ? Json(std::string(to_string(*r.reverify_verdict))) : Json(nullptr);
  return j;
}

namespace {

Json overlay_array(const RegionMap& m) {
  Json arr = Json::array();
  for (const auto& o : m.overlay) {
    Json pt;
    pt["p"] = o.p;
    pt[m.mode == RegionMode::PC ? "c0" : "alpha_min"] = o.value;
    pt["degenerate"] = o.degenerate;
    arr.push_back(std::move(pt));
  }
  return arr;
}

}  // namespace

Json to_json(const RegionMap& m) {
  Json j;
  j["mode"] = std::string(to_string(m.mode));
  j["family"] = std::string(to_string(m.family));
  j["N"] = m.N;
  Json cells = Json::array();
  for (const auto& c : m.cells) {
    Json cell;
    cell["p"] = c.p;
    cell["second"] = c.second;
    cell["cert_verdict"] = c.cert_verdict;
    cell["battery_verdict"] = std::string(to_string(c.battery_verdict));
    cell["min_margin"] = c.min_margin;
    cell["class"] = std::string(to_string(c.cls));
    cells.push_back(std::move(cell));
  }
  j["cells"] = std::move(cells);
  j["overlay"] = overlay_array(m);
  return j;
}

Json overlay_json(const RegionMap& m) {
  Json j;
  j["mode"] = std::string(to_string(m.mode));
  j["family"] = std::string(to_string(m.family));
  j["N"] = m.N;
  j["overlay"] = overlay_array(m);
  Json classes = Json::array();
  for (const auto& c : m.cells) {
    classes.push_back(Json{{"p", c.p}, {"second", c.second}, {"class", std::string(to_string(c.cls))}});
  }
  j["classes"] = std::move(classes);
  return j;
}

std::string region_csv(const RegionMap& m) {
  std::ostringstream os;
  os << "mode,p,second,cert_verdict,battery_verdict,min_margin\n";
  for (const auto& c : m.cells) {
    os << to_string(m.mode) << ',' << format_double(c.p) << ',' << format_double(c.second) << ','
       << c.cert_verdict << ',' << to_string(c.battery_verdict) << ','
       << format_double(c.min_margin) << '\n';
  }
  return os.str();
}

}  // namespace copson
