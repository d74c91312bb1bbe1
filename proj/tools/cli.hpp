#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qmcforge/qmcforge.hpp"

namespace qmcforge::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kResource = 3 };

struct ConstructOptions {
  std::string kind = "lattice";
  std::int64_t n = 0;
  int b = 2;
  int m = 0;
  std::string p;
  int s = 1;
  double alpha = 1.0;
  std::string weights = "product:j^-2";
  bool fast = false;
  std::string out;
};

struct EvaluateOptions {
  std::string rule_path;
  std::optional<double> alpha;
  std::string weights;
  bool rho = false;
  bool discrepancy = false;
  bool per_subset = false;
  std::int64_t radius = std::int64_t{1} << 16;
  std::string format = "json";
};

struct CertifyOptions {
  std::string selector;
  std::string rule_path;
  std::optional<double> alpha;
  std::string weights;
  std::optional<double> alpha_prime;
  std::string weights_prime;
  double lambda = 1.0;
  double delta = 0.5;
  std::string format = "json";
};

struct SweepOptions {
  std::string kind = "lattice";
  std::string grid;
  int b = 2;
  int s = 2;
  double alpha = 1.0;
  std::string weights = "product:j^-2";
  std::optional<double> alpha_prime;
  std::string weights_prime;
  std::string certify;
  bool fast = false;
  std::string out;
};

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("bad integer '" + tok + "'");
    }
  }
  return out;
}

/// "17,31,61", "8..64" (every integer) or "primes:17..251".
inline std::vector<std::int64_t> parse_grid(const std::string& text) {
  std::string t = text;
  bool primes_only = false;
  if (t.rfind("primes:", 0) == 0) {
    primes_only = true;
    t = t.substr(7);
  }
  std::vector<std::int64_t> out;
  const auto dots = t.find("..");
  if (dots != std::string::npos) {
    const auto lo = parse_int_list(t.substr(0, dots)), hi = parse_int_list(t.substr(dots + 2));
    if (lo.size() != 1 || hi.size() != 1) throw UsageError("grid range must look like a..b");
    for (std::int64_t v = lo[0]; v <= hi[0]; ++v) {
      if (!primes_only || is_prime(v)) out.push_back(v);
    }
  } else if (!t.empty()) {
    for (int v : parse_int_list(t)) {
      if (!primes_only || is_prime(v)) out.push_back(v);
    }
  }
  return out;
}

inline void print_trace(std::ostream& os, const CbcTrace& trace) {
  os << "step,choice,merit\n";
  os.precision(17);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    os << i + 1 << ',' << trace.steps[i].choice << ',' << trace.steps[i].merit << '\n';
  }
}

inline GFPoly modulus_from_flags(int b, int m, const std::string& p_text) {
  if (!p_text.empty()) {
    GFPoly p(b, parse_int_list(p_text));
    if (m != 0 && p.degree() != m) throw UsageError("--p has degree " + std::to_string(p.degree()) + ", not m");
    return p;
  }
  if (m < 1) throw UsageError("poly-lattice needs --m >= 1 or --p");
  return smallest_irreducible(b, m);
}

inline int cmd_construct(const ConstructOptions& o, std::ostream& os, std::ostream& es) {
  const WeightSet w = io::parse_weights(o.weights);
  const SpaceParams params(o.alpha, w);
  io::RuleFile rf{LatticeRule(2, {1}), o.alpha, w, std::nullopt};
  json extra = json::object();
  if (o.kind == "lattice") {
    if (o.n < 2) throw UsageError("lattice construction needs --N >= 2");
    std::pair<LatticeRule, CbcTrace> res = [&] {
      if (!o.fast) return cbc_construct(o.n, o.s, params);
      if (w.kind() != WeightKind::Product) throw UsageError("--fast needs product weights");
      return cbc_construct_fast(o.n, o.s, detail::integer_alpha(o.alpha), w.gamma());
    }();
    rf.rule = res.first;
    rf.trace = res.second;
  } else if (o.kind == "poly-lattice") {
    if (o.fast) throw UsageError("--fast applies to lattice rules only");
    const GFPoly p = modulus_from_flags(o.b, o.m, o.p);
    auto res = cbc_construct_poly(p, o.s, params);
    if (!res.modulus_irreducible) {
      es << "warning: modulus " << p.to_string() << " is reducible; the CBC error bound is not certified\n";
    }
    extra["modulus_irreducible"] = res.modulus_irreducible;
    rf.rule = res.rule;
    rf.trace = res.trace;
  } else {
    throw UsageError("--kind must be lattice or poly-lattice");
  }
  json j = io::rule_to_json(rf);
  j.update(extra);
  if (o.out.empty()) {
    os << j.dump(2) << '\n';
  } else {
    io::write_json_file(o.out, j);
    print_trace(os, *rf.trace);
  }
  return kOk;
}

struct ResolvedSpace {
  double alpha;
  WeightSet weights;
};

inline ResolvedSpace resolve_space(const io::RuleFile& rf, std::optional<double> alpha, const std::string& weights,
                                   const char* what) {
  const std::optional<double> a = alpha ? alpha : rf.alpha;
  if (!a) throw UsageError(std::string("no ") + what + " smoothness: pass it or store it in the rule file");
  if (!weights.empty()) return {*a, io::parse_weights(weights)};
  if (!rf.weights) throw UsageError(std::string("no ") + what + " weights: pass them or store them in the rule file");
  return {*a, *rf.weights};
}

inline void write_report_csv(std::ostream& os, const json& j) {
  os.precision(17);
  os << "field,value\n";
  for (const auto& [key, val] : j.items()) {
    if (val.is_primitive()) os << key << ',' << (val.is_string() ? val.get<std::string>() : val.dump()) << '\n';
  }
  if (j.contains("per_subset")) {
    os << "u,inner,phi,phi0\n";
    for (const auto& row : j.at("per_subset")) {
      std::string u;
      for (int c : row.at("u")) u += (u.empty() ? "" : " ") + std::to_string(c);
      os << u << ',' << (row.contains("inner") ? row.at("inner").dump() : "") << ','
         << (row.contains("phi") ? row.at("phi").dump() : "") << ','
         << (row.contains("phi0") ? row.at("phi0").dump() : "") << '\n';
    }
  }
}

inline int cmd_evaluate(const EvaluateOptions& o, std::ostream& os) {
  const io::RuleFile rf = io::rule_from_json(io::read_json_file(o.rule_path));
  const auto sp = resolve_space(rf, o.alpha, o.weights, "target");
  const SpaceParams params(sp.alpha, sp.weights);
  MeritReport report;
  std::optional<DiscrepancyReport> disc;
  if (const auto* lat = std::get_if<LatticeRule>(&rf.rule)) {
    if (has_closed_form(sp.alpha)) {
      report = p_merit_closed(*lat, params, o.per_subset);
    } else {
      report = p_merit_series(*lat, params, std::max(o.radius, lat->modulus()), o.per_subset);
    }
    if (o.rho) report = merge(report, zaremba_rho(*lat, params));
    if (o.discrepancy) {
      DiscrepancyReport d = star_disc_bound_lattice(*lat, sp.weights);
      if (check_monotone(sp.weights, lat->dimension())) {
        const auto r = star_disc_bound_rho_lattice(*lat, sp.alpha, sp.weights, sp.weights);
        d.bound_rho = r.bound_rho;
        d.bound_rho_infinite = r.bound_rho_infinite;
      }
      if (lat->dimension() <= 2 && lat->modulus() <= 256) {
        d.exact_dstar = weighted_exact_star_discrepancy(lattice_points(*lat), sp.weights);
      }
      disc = d;
    }
  } else {
    const auto& poly = std::get<PolyLatticeRule>(rf.rule);
    report = p_merit_wal_closed(poly, params, o.per_subset);
    if (o.rho) report = merge(report, rho_wal(poly, params));
    if (o.discrepancy) {
      DiscrepancyReport d = star_disc_bound_poly(poly, sp.weights);
      if (check_monotone(sp.weights, poly.dimension())) {
        const auto r = star_disc_bound_rho_poly(poly, sp.alpha, sp.weights, sp.weights);
        d.bound_rho = r.bound_rho;
        d.bound_rho_infinite = r.bound_rho_infinite;
      }
      if (poly.dimension() <= 2 && poly.size() <= 256) {
        d.exact_dstar = weighted_exact_star_discrepancy(poly_lattice_points(poly), sp.weights);
      }
      disc = d;
    }
  }
  json j = io::report_to_json(report);
  j["alpha"] = sp.alpha;
  if (disc) j["discrepancy"] = io::discrepancy_to_json(*disc);
  if (o.format == "csv") {
    json flat = j;
    if (disc) {
      for (const auto& [k, v] : j.at("discrepancy").items()) {
        if (v.is_primitive()) flat[k] = v;
      }
    }
    write_report_csv(os, flat);
  } else if (o.format == "json") {
    os << j.dump(2) << '\n';
  } else {
    throw UsageError("--format must be json or csv");
  }
  return kOk;
}

inline int cmd_certify(const CertifyOptions& o, std::ostream& os) {
  const io::RuleFile rf = io::rule_from_json(io::read_json_file(o.rule_path));
  const auto base = resolve_space(rf, o.alpha, o.weights, "construction");
  const double ap = o.alpha_prime.value_or(base.alpha);
  const WeightSet wp = o.weights_prime.empty() ? base.weights : io::parse_weights(o.weights_prime);
  const auto* lat = std::get_if<LatticeRule>(&rf.rule);
  const auto* poly = std::get_if<PolyLatticeRule>(&rf.rule);
  auto need_lattice = [&] {
    if (!lat) throw UsageError(o.selector + " applies to lattice rules");
  };
  auto need_poly = [&] {
    if (!poly) throw UsageError(o.selector + " applies to polynomial lattice rules");
  };

  StabilityCertificate cert;
  if (o.selector == "thm1") {
    need_lattice();
    cert = theorem1_bound(*lat, base.alpha, base.weights, ap, wp);
  } else if (o.selector == "thm2") {
    need_poly();
    cert = theorem2_bound_poly(*poly, base.alpha, base.weights, ap, wp);
  } else if (o.selector == "prop1") {
    need_lattice();
    cert = prop_certificate_lattice(*lat, base.alpha, base.weights, o.lambda);
  } else if (o.selector == "prop2") {
    need_poly();
    if (!gf_is_irreducible(poly->modulus())) throw UsageError("prop2 needs an irreducible modulus");
    cert = prop_certificate_poly(*poly, base.alpha, base.weights, o.lambda);
  } else if (o.selector == "eq1") {
    need_lattice();
    cert = combined_bound_eq1(*lat, base.alpha, base.weights, ap, wp, o.lambda);
  } else if (o.selector == "jensen") {
    cert = lat ? jensen_certificate(*lat, base.alpha, base.weights, o.delta)
               : jensen_certificate_poly(*poly, base.alpha, base.weights, o.delta);
  } else {
    throw UsageError("selector must be one of thm1, thm2, prop1, prop2, eq1, jensen");
  }

  if (o.format == "csv") {
    const int s = lat ? lat->dimension() : poly->dimension();
    const std::int64_t size = lat ? lat->modulus() : poly->m();
    os << io::certificate_csv_header() << '\n' << io::certificate_csv_row(s, size, cert) << '\n';
  } else if (o.format == "json") {
    os << io::certificate_to_json(cert).dump(2) << '\n';
  } else {
    throw UsageError("--format must be json or csv");
  }
  return cert.passed ? kOk : kCheckFailed;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline int cmd_sweep(const SweepOptions& o, std::ostream& os) {
  const auto grid = parse_grid(o.grid);
  if (grid.empty()) throw UsageError("sweep grid is empty");
  const WeightSet w = io::parse_weights(o.weights);
  const SpaceParams params(o.alpha, w);
  const double ap = o.alpha_prime.value_or(o.alpha);
  const WeightSet wp = o.weights_prime.empty() ? w : io::parse_weights(o.weights_prime);
  const bool lattice = o.kind == "lattice";
  if (!lattice && o.kind != "poly-lattice") throw UsageError("--kind must be lattice or poly-lattice");
  if (!o.certify.empty() && o.certify != (lattice ? "thm1" : "thm2")) {
    throw UsageError(std::string("sweep --certify supports ") + (lattice ? "thm1" : "thm2") + " for this kind");
  }

  std::ostringstream table;
  table.precision(12);
  table << "N_or_m,P,sqrtP,prop_bound," << (lattice ? "thm1_rhs" : "thm2_rhs") << (o.certify.empty() ? "" : ",passed")
        << '\n';
  std::vector<double> xs, ys;
  bool all_passed = true;
  for (std::int64_t size : grid) {
    double p = 0.0, prop = 0.0;
    std::optional<StabilityCertificate> cert;
    if (lattice) {
      const LatticeRule rule = [&] {
        if (!o.fast) return cbc_construct(size, o.s, params).first;
        if (w.kind() != WeightKind::Product) throw UsageError("--fast needs product weights");
        return cbc_construct_fast(size, o.s, detail::integer_alpha(o.alpha), w.gamma()).first;
      }();
      p = p_merit_best(rule, params).value;
      prop = prop_bound_lattice(size, o.s, o.alpha, w, 1.0);
      try {
        cert = theorem1_bound(rule, o.alpha, w, ap, wp);
      } catch (const ResourceError&) {
      }
      xs.push_back(static_cast<double>(size));
    } else {
      if (size < 1 || size > 20) throw UsageError("poly-lattice grid holds m values in 1..20");
      const auto res = cbc_construct_poly(smallest_irreducible(o.b, static_cast<int>(size)), o.s, params);
      p = *p_merit_wal_closed(res.rule, params).p_value;
      prop = prop_bound_poly(o.b, static_cast<int>(size), o.s, o.alpha, w, 1.0);
      try {
        cert = theorem2_bound_poly(res.rule, o.alpha, w, ap, wp);
      } catch (const ResourceError&) {
      }
      xs.push_back(std::pow(static_cast<double>(o.b), static_cast<double>(size)));
    }
    ys.push_back(std::sqrt(p));
    table << size << ',' << p << ',' << std::sqrt(p) << ',' << prop << ',';
    if (cert) {
      table << cert->rhs;
    } else {
      table << "nan";
    }
    if (!o.certify.empty()) {
      if (!cert) throw ResourceError("theorem bound out of reach for N_or_m = " + std::to_string(size));
      table << ',' << (cert->passed ? "true" : "false");
      all_passed = all_passed && cert->passed;
    }
    table << '\n';
  }
  table << "# slope_sqrtP," << loglog_slope(xs, ys) << '\n';
  if (o.out.empty()) {
    os << table.str();
  } else {
    std::ofstream out(o.out);
    if (!out) throw UsageError("cannot write '" + o.out + "'");
    out << table.str();
  }
  return all_passed ? kOk : kCheckFailed;
}

/// Turns the JSON object in --config into flags for the chosen subcommand.
/// Keys use option names (underscores may stand for dashes); flags given on
/// the command line win.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (config_path.empty()) return out;
  const json cfg = io::read_json_file(config_path);
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  auto given = [&](const std::string& flag) {
    for (const auto& a : out) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> extra;
  for (const auto& [key, val] : cfg.items()) {
    std::string name = key;
    for (char& c : name) {
      if (c == '_') c = '-';
    }
    if (name == "command") continue;
    const std::string flag = "--" + name;
    if (given(flag)) continue;
    if (val.is_boolean()) {
      if (val.get<bool>()) extra.push_back(flag);
      continue;
    }
    std::string text;
    if (val.is_string()) {
      text = val.get<std::string>();
    } else if (val.is_array() && std::all_of(val.begin(), val.end(), [](const json& e) { return e.is_number(); })) {
      for (const auto& e : val) text += (text.empty() ? "" : ",") + e.dump();
    } else {
      text = val.dump();
    }
    extra.push_back(flag);
    extra.push_back(text);
  }
  std::vector<std::string> merged;
  auto rest = out.begin();
  if (!out.empty() && out.front().rfind("-", 0) != 0) {
    merged.push_back(*rest++);
  } else if (cfg.contains("command")) {
    merged.push_back(cfg.at("command").get<std::string>());
  }
  merged.insert(merged.end(), extra.begin(), extra.end());
  merged.insert(merged.end(), rest, out.end());
  return merged;
}

inline int run(int argc, char** argv, std::ostream& os = std::cout, std::ostream& es = std::cerr) {
  CLI::App app{"Lattice and polynomial lattice rules: construction, merits, bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qmcforge 1.0.0");
  app.add_option("--config", "JSON file whose keys replace command-line flags");

  ConstructOptions co;
  auto* construct = app.add_subcommand("construct", "Build a rule by component-by-component search");
  construct->add_option("--kind", co.kind, "lattice or poly-lattice")->capture_default_str();
  construct->add_option("--N", co.n, "number of points (lattice)");
  construct->add_option("--b", co.b, "prime base (poly-lattice)")->capture_default_str();
  construct->add_option("--m", co.m, "degree of the modulus (poly-lattice)");
  construct->add_option("--p", co.p, "modulus coefficients, lowest degree first (default: smallest irreducible)");
  construct->add_option("--s", co.s, "dimension")->capture_default_str();
  construct->add_option("--alpha", co.alpha, "smoothness")->capture_default_str();
  construct->add_option("--weights", co.weights, "weights, e.g. product:j^-2")->capture_default_str();
  construct->add_flag("--fast", co.fast, "FFT construction (prime N, product weights, integer alpha)");
  construct->add_option("--out", co.out, "rule file to write (default: print JSON)");

  EvaluateOptions eo;
  auto* evaluate = app.add_subcommand("evaluate", "Squared worst-case error and related quantities of a rule");
  evaluate->add_option("rule", eo.rule_path, "rule JSON file")->required();
  evaluate->add_option("--alpha", eo.alpha, "smoothness (default: from the rule file)");
  evaluate->add_option("--weights", eo.weights, "weights (default: from the rule file)");
  evaluate->add_flag("--rho", eo.rho, "include the figure of merit rho and per-subset phi");
  evaluate->add_flag("--discrepancy", eo.discrepancy, "include weighted star discrepancy bounds");
  evaluate->add_flag("--per-subset", eo.per_subset, "per-subset breakdown of P");
  evaluate->add_option("--radius", eo.radius, "series truncation radius for non-integer alpha")->capture_default_str();
  evaluate->add_option("--format", eo.format, "json or csv")->capture_default_str();

  CertifyOptions ce;
  auto* certify = app.add_subcommand("certify", "Check a stability or construction bound on a rule");
  certify->add_option("selector", ce.selector, "thm1, thm2, prop1, prop2, eq1 or jensen")->required();
  certify->add_option("rule", ce.rule_path, "rule JSON file")->required();
  certify->add_option("--alpha", ce.alpha, "construction smoothness (default: from the rule file)");
  certify->add_option("--weights", ce.weights, "construction weights (default: from the rule file)");
  certify->add_option("--alpha-prime", ce.alpha_prime, "target smoothness (default: alpha)");
  certify->add_option("--weights-prime", ce.weights_prime, "target weights (default: weights)");
  certify->add_option("--lambda", ce.lambda, "exponent for prop1/prop2/eq1")->capture_default_str();
  certify->add_option("--delta", ce.delta, "exponent for jensen")->capture_default_str();
  certify->add_option("--format", ce.format, "json or csv")->capture_default_str();

  SweepOptions so;
  auto* sweep = app.add_subcommand("sweep", "Construct and evaluate over a grid of sizes");
  sweep->add_option("--kind", so.kind, "lattice or poly-lattice")->capture_default_str();
  sweep->add_option("--grid", so.grid, "sizes: 17,31,61 or 8..64 or primes:17..251 (m values for poly-lattice)");
  sweep->add_option("--b", so.b, "prime base (poly-lattice)")->capture_default_str();
  sweep->add_option("--s", so.s, "dimension")->capture_default_str();
  sweep->add_option("--alpha", so.alpha, "smoothness")->capture_default_str();
  sweep->add_option("--weights", so.weights, "weights")->capture_default_str();
  sweep->add_option("--alpha-prime", so.alpha_prime, "target smoothness for the theorem column");
  sweep->add_option("--weights-prime", so.weights_prime, "target weights for the theorem column");
  sweep->add_option("--certify", so.certify, "thm1 (lattice) or thm2 (poly-lattice): add a passed column");
  sweep->add_flag("--fast", so.fast, "FFT construction");
  sweep->add_option("--out", so.out, "CSV file (default: stdout)");

  try {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    args = expand_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, os, es);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    es << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*construct) return cmd_construct(co, os, es);
    if (*evaluate) return cmd_evaluate(eo, os);
    if (*certify) return cmd_certify(ce, os);
    if (*sweep) return cmd_sweep(so, os);
  } catch (const ResourceError& e) {
    es << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const std::invalid_argument& e) {  // usage and unsupported-input errors
    es << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    es << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    es << "check failed: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace qmcforge::cli
