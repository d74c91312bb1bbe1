#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "qmcforge/discrepancy.hpp"
#include "qmcforge/errors.hpp"
#include "qmcforge/gf_poly.hpp"
#include "qmcforge/lattice.hpp"
#include "qmcforge/lattice_cbc.hpp"
#include "qmcforge/merit_report.hpp"
#include "qmcforge/stability.hpp"
#include "qmcforge/walsh_merit.hpp"
#include "qmcforge/weights.hpp"

namespace qmcforge::io {

using nlohmann::json;

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\n\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\n\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
  if (used != t.size()) throw UsageError("not a number: '" + text + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

}  // namespace detail

/// Sequence a_1..a_count from either a comma list ("1,0.5,0.25") or a
/// formula in the index: "j^-2", "0.5*j^-3", "0.5·j^-3", "k^-1" or a constant.
/// A comma list shorter than count is returned as is.
inline std::vector<double> parse_sequence(const std::string& text, int count) {
  std::string t = detail::trim(text);
  if (t.empty()) throw UsageError("empty weight sequence");
  for (std::size_t pos; (pos = t.find("\xC2\xB7")) != std::string::npos;) t.replace(pos, 2, "*");
  if (t.find(',') != std::string::npos) {
    std::vector<double> out;
    for (const auto& p : detail::split(t, ',')) out.push_back(detail::parse_number(p));
    return out;
  }
  const auto var = t.find_first_of("jk");
  if (var == std::string::npos) return std::vector<double>(static_cast<std::size_t>(count), detail::parse_number(t));
  double coef = 1.0;
  const std::string head = detail::trim(t.substr(0, var));
  if (!head.empty()) {
    if (head.back() != '*') throw UsageError("weight formula must look like c*j^e: '" + text + "'");
    coef = detail::parse_number(head.substr(0, head.size() - 1));
  }
  double expo = 1.0;
  const std::string tail = detail::trim(t.substr(var + 1));
  if (!tail.empty()) {
    if (tail.front() != '^') throw UsageError("weight formula must look like c*j^e: '" + text + "'");
    expo = detail::parse_number(tail.substr(1));
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int j = 1; j <= count; ++j) out[j - 1] = coef * std::pow(static_cast<double>(j), expo);
  return out;
}

inline WeightSet weights_from_json(const json& j);

/// Weight specification from a flag string:
///   product:<seq>            gamma_u = prod gamma_j
///   pod:Gamma=<seq>;gamma=<seq>
///   order:<seq>              gamma_u = Gamma_{|u|}
///   explicit:1=0.5;1,2=0.25  listed subsets, others zero
///   constant:<v>             gamma_u = v
/// or a JSON object (text starting with '{').
inline WeightSet parse_weights(const std::string& text) {
  const std::string t = detail::trim(text);
  if (!t.empty() && t.front() == '{') {
    try {
      return weights_from_json(json::parse(t));
    } catch (const json::exception& e) {
      throw UsageError(std::string("bad weights JSON: ") + e.what());
    }
  }
  const auto colon = t.find(':');
  if (colon == std::string::npos) throw UsageError("weights must look like kind:values, got '" + text + "'");
  const std::string kind = detail::trim(t.substr(0, colon));
  const std::string body = t.substr(colon + 1);
  constexpr int n = WeightSet::kDefaultMaxDim;
  if (kind == "product") return WeightSet::product(parse_sequence(body, n));
  if (kind == "order") return WeightSet::order_dependent(parse_sequence(body, n));
  if (kind == "constant") return WeightSet::constant(n, detail::parse_number(body));
  if (kind == "pod") {
    std::optional<std::vector<double>> big, small;
    for (const auto& part : detail::split(body, ';')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw UsageError("pod weights need Gamma=...;gamma=...");
      const std::string key = detail::trim(part.substr(0, eq));
      if (key == "Gamma") {
        big = parse_sequence(part.substr(eq + 1), n);
      } else if (key == "gamma") {
        small = parse_sequence(part.substr(eq + 1), n);
      } else {
        throw UsageError("unknown pod key '" + key + "'");
      }
    }
    if (!big || !small) throw UsageError("pod weights need both Gamma and gamma");
    return WeightSet::pod(*big, *small);
  }
  if (kind == "explicit") {
    std::map<CoordSet, double> values;
    for (const auto& part : detail::split(body, ';')) {
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw UsageError("explicit weights need u=value entries");
      std::vector<int> coords;
      for (const auto& c : detail::split(part.substr(0, eq), ',')) coords.push_back(static_cast<int>(detail::parse_number(c)));
      values[CoordSet::of(coords)] = detail::parse_number(part.substr(eq + 1));
    }
    return WeightSet::explicit_map(std::move(values));
  }
  throw UsageError("unknown weight kind '" + kind + "'");
}

inline json weights_to_json(const WeightSet& w) {
  json j;
  j["kind"] = to_string(w.kind());
  switch (w.kind()) {
    case WeightKind::Product:
      j["gamma"] = w.gamma();
      break;
    case WeightKind::POD:
      j["Gamma"] = w.order();
      j["gamma"] = w.gamma();
      break;
    case WeightKind::OrderDependent:
      j["Gamma"] = w.order();
      break;
    case WeightKind::Explicit: {
      json values = json::array();
      for (const auto& [u, g] : w.explicit_values()) values.push_back({{"u", u.coords()}, {"gamma", g}});
      j["values"] = values;
      j["s_max"] = w.s_max();
      break;
    }
  }
  return j;
}

namespace detail {

inline std::vector<double> sequence_field(const json& j, const char* key) {
  if (!j.contains(key)) throw UsageError(std::string("weights JSON lacks '") + key + "'");
  const json& v = j.at(key);
  if (v.is_string()) return parse_sequence(v.get<std::string>(), WeightSet::kDefaultMaxDim);
  if (v.is_number()) return std::vector<double>(WeightSet::kDefaultMaxDim, v.get<double>());
  return v.get<std::vector<double>>();
}

}  // namespace detail

inline WeightSet weights_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "product") return WeightSet::product(detail::sequence_field(j, "gamma"));
    if (kind == "pod") return WeightSet::pod(detail::sequence_field(j, "Gamma"), detail::sequence_field(j, "gamma"));
    if (kind == "order") return WeightSet::order_dependent(detail::sequence_field(j, "Gamma"));
    if (kind == "explicit") {
      std::map<CoordSet, double> values;
      for (const auto& e : j.at("values")) values[CoordSet::of(e.at("u").get<std::vector<int>>())] = e.at("gamma").get<double>();
      return WeightSet::explicit_map(std::move(values), j.value("s_max", WeightSet::kExplicitMaxDim));
    }
    throw UsageError("unknown weight kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad weights JSON: ") + e.what());
  }
}

inline json poly_to_json(const GFPoly& p) { return p.coeffs(); }

inline GFPoly poly_from_json(const json& j, int b) {
  if (!j.is_array()) throw UsageError("polynomial must be a coefficient array (lowest degree first)");
  return GFPoly(b, j.get<std::vector<int>>());
}

inline json trace_to_json(const CbcTrace& trace) {
  json steps = json::array();
  for (const auto& st : trace.steps) steps.push_back({{"choice", st.choice}, {"merit", st.merit}});
  return steps;
}

/// A rule together with the space it was built for.
struct RuleFile {
  std::variant<LatticeRule, PolyLatticeRule> rule;
  std::optional<double> alpha;
  std::optional<WeightSet> weights;
  std::optional<CbcTrace> trace;
};

inline json rule_to_json(const RuleFile& rf) {
  json j;
  if (const auto* lat = std::get_if<LatticeRule>(&rf.rule)) {
    j["type"] = "lattice";
    j["N"] = lat->modulus();
    j["z"] = lat->generator();
  } else {
    const auto& poly = std::get<PolyLatticeRule>(rf.rule);
    j["type"] = "poly-lattice";
    j["b"] = poly.base();
    j["m"] = poly.m();
    j["p"] = poly_to_json(poly.modulus());
    json q = json::array();
    for (const auto& qj : poly.generator()) q.push_back(poly_to_json(qj));
    j["q"] = q;
  }
  if (rf.alpha) j["alpha"] = *rf.alpha;
  if (rf.weights) j["weights"] = weights_to_json(*rf.weights);
  if (rf.trace) {
    j["trace"] = trace_to_json(*rf.trace);
    j["evaluations"] = rf.trace->evaluations;
  }
  return j;
}

inline RuleFile rule_from_json(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    std::optional<double> alpha;
    std::optional<WeightSet> weights;
    if (j.contains("alpha")) alpha = j.at("alpha").get<double>();
    if (j.contains("weights")) weights = weights_from_json(j.at("weights"));
    std::optional<CbcTrace> trace;
    if (j.contains("trace")) {
      CbcTrace t;
      for (const auto& st : j.at("trace")) t.steps.push_back({st.at("choice").get<std::int64_t>(), st.at("merit").get<double>()});
      t.evaluations = j.value("evaluations", std::int64_t{0});
      trace = t;
    }
    if (type == "lattice") {
      return {LatticeRule(j.at("N").get<std::int64_t>(), j.at("z").get<std::vector<std::int64_t>>()), alpha, weights,
              trace};
    }
    if (type == "poly-lattice") {
      const int b = j.at("b").get<int>();
      const GFPoly p = poly_from_json(j.at("p"), b);
      if (j.contains("m") && j.at("m").get<int>() != p.degree()) throw UsageError("rule file: m differs from deg p");
      std::vector<GFPoly> q;
      for (const auto& qj : j.at("q")) q.push_back(poly_from_json(qj, b));
      return {PolyLatticeRule(p, std::move(q)), alpha, weights, trace};
    }
    throw UsageError("rule type must be 'lattice' or 'poly-lattice'");
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad rule JSON: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

inline json report_to_json(const MeritReport& r) {
  json j = json::object();
  if (r.p_value) j["P"] = *r.p_value;
  if (r.rho_value) j["rho"] = *r.rho_value;
  if (r.method) j["method"] = to_string(*r.method);
  if (r.truncation_bound) j["truncation_bound"] = *r.truncation_bound;
  if (!r.per_subset.empty()) {
    json rows = json::array();
    for (const auto& e : r.per_subset) {
      json row{{"u", e.u.coords()}};
      if (e.inner) row["inner"] = *e.inner;
      if (e.phi) row["phi"] = *e.phi;
      if (e.phi0) row["phi0"] = *e.phi0;
      rows.push_back(row);
    }
    j["per_subset"] = rows;
  }
  return j;
}

namespace detail {

// JSON has no infinity; such values are written as the string "inf".
inline json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace detail

inline json discrepancy_to_json(const DiscrepancyReport& d) {
  json j = json::object();
  if (d.bound_joe) j["bound_joe"] = *d.bound_joe;
  if (d.bound_rho) j["bound_rho"] = detail::number_or_inf(*d.bound_rho);
  if (d.exact_dstar) j["exact_dstar"] = *d.exact_dstar;
  if (d.bound_rho_infinite) j["bound_rho_infinite"] = true;
  if (!d.r_values.empty()) {
    json rows = json::array();
    for (const auto& [u, r] : d.r_values) rows.push_back({{"u", u.coords()}, {"R", r}});
    j["per_subset"] = rows;
  }
  return j;
}

inline json certificate_to_json(const StabilityCertificate& c) {
  return {{"bound", c.bound},
          {"lhs", c.lhs},
          {"rhs", detail::number_or_inf(c.rhs)},
          {"margin", detail::number_or_inf(c.margin)},
          {"passed", c.passed},
          {"vacuous", c.vacuous},
          {"components",
           {{"rho", c.components.rho},
            {"c_alpha_prime", c.components.c_alpha_prime},
            {"subset_sum", detail::number_or_inf(c.components.subset_sum)}}}};
}

inline std::string certificate_csv_header() { return "s,N_or_m,lhs,rhs,margin,passed"; }

inline std::string certificate_csv_row(int s, std::int64_t n_or_m, const StabilityCertificate& c) {
  std::ostringstream out;
  out.precision(17);
  out << s << ',' << n_or_m << ',' << c.lhs << ',' << c.rhs << ',' << c.margin << ',' << (c.passed ? "true" : "false");
  return out.str();
}

inline json probe_to_json(const ProbeTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"s", r.s},
                    {"N_or_m", r.n_or_m},
                    {"sup_terms", r.sup_terms},
                    {"observed", std::isnan(r.observed) ? json(nullptr) : json(r.observed)},
                    {"rate", r.rate},
                    {"ratio", std::isnan(r.ratio) ? json(nullptr) : json(r.ratio)},
                    {"bound", r.bound}});
  }
  return {{"kind", to_string(t.kind)}, {"constant", t.constant}, {"rows", rows}};
}

}  // namespace qmcforge::io
