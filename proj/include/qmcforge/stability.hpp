#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qmcforge/detail/parallel.hpp"
#include "qmcforge/discrepancy.hpp"
#include "qmcforge/gf_poly.hpp"
#include "qmcforge/korobov_merit.hpp"
#include "qmcforge/lattice.hpp"
#include "qmcforge/lattice_cbc.hpp"
#include "qmcforge/walsh_merit.hpp"
#include "qmcforge/weights.hpp"
#include "qmcforge/zeta.hpp"

namespace qmcforge {

/// c_{alpha'} = (1 + zeta(2a')) + (2^{2a'} + zeta(2a')) (2^{2a'-1} - 1) / 2^{4a'}.
inline double c_alpha_prime(double alpha_prime) {
  if (!(alpha_prime > 0.5)) throw DomainError("alpha' must exceed 1/2");
  const double z = riemann_zeta(2.0 * alpha_prime);
  return (1.0 + z) + (std::exp2(2.0 * alpha_prime) + z) * (std::exp2(2.0 * alpha_prime - 1.0) - 1.0) /
                         std::exp2(4.0 * alpha_prime);
}

struct CertificateComponents {
  double rho = 0.0;
  double c_alpha_prime = 1.0;
  double subset_sum = 0.0;
};

/// lhs <= rhs check for one bound. An infinite rhs (some gamma_u = 0 < gamma'_u)
/// is a vacuous pass.
struct StabilityCertificate {
  std::string bound;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  CertificateComponents components;
  bool passed = false;
  bool vacuous = false;
};

inline constexpr double kCertificateSlack = 1e-9;

namespace detail {

inline StabilityCertificate finish_certificate(std::string bound, double lhs, double rhs,
                                               CertificateComponents comp) {
  StabilityCertificate c;
  c.bound = std::move(bound);
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = rhs - lhs;
  c.components = comp;
  c.vacuous = std::isinf(rhs);
  c.passed = c.vacuous || lhs <= rhs * (1.0 + kCertificateSlack);
  return c;
}

// sum_u gamma'_u / gamma_u^expo * factor(|u|); +inf when gamma_u = 0 < gamma'_u.
inline double ratio_subset_sum(const WeightSet& w, const WeightSet& wprime, int s, double expo,
                               const std::function<double(int)>& factor) {
  double total = 0.0;
  bool infinite = false;
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const double gp = wprime.weight(u);
    if (gp == 0.0) return;
    const double g = w.weight(u);
    if (g == 0.0) {
      infinite = true;
      return;
    }
    total += gp / std::pow(g, expo) * factor(u.size());
  });
  return infinite ? std::numeric_limits<double>::infinity() : total;
}

inline double thm1_subset_sum(const WeightSet& w, const WeightSet& wprime, int s, std::int64_t n, double alpha,
                              double alpha_prime) {
  const double a = std::exp2(2.0 * alpha_prime + 1.0) / (std::exp2(2.0 * alpha_prime - 1.0) - 1.0);
  const double lg = std::log2(static_cast<double>(n));
  return ratio_subset_sum(w, wprime, s, alpha_prime / alpha,
                          [&](int d) { return std::pow(a, d) * std::pow(lg, d - 1); });
}

inline double thm2_subset_sum(const WeightSet& w, const WeightSet& wprime, int s, int b, int m, double alpha,
                              double alpha_prime) {
  const double t = std::pow(static_cast<double>(b), 2.0 * alpha_prime - 1.0);
  const double a = t * (b - 1) / (t - 1.0);
  return ratio_subset_sum(w, wprime, s, alpha_prime / alpha,
                          [&](int d) { return std::pow(a, d) * std::pow(m + 1.0, d - 1); });
}

inline double times_power(double c, double base, double expo, double sum) {
  if (std::isinf(sum)) return sum;
  if (sum == 0.0) return 0.0;
  return c * std::pow(base, expo) * sum;
}

// Upper estimate of P_{alpha,gamma,N}(z): exact for integer alpha, series plus tail otherwise.
inline double p_upper(const LatticeRule& rule, const SpaceParams& params) {
  return p_merit_best(rule, params).upper;
}

}  // namespace detail

/// P_{a',g',N}(z) <= c_{a'} rho_{a,g,N}(z)^{a'/a} sum_u (g'_u / g_u^{a'/a}) (2^{2a'+1}/(2^{2a'-1}-1))^{|u|} (log2 N)^{|u|-1}.
/// Needs gamma_v >= gamma_u for v subset of u.
inline StabilityCertificate theorem1_bound(const LatticeRule& rule, double alpha, const WeightSet& w,
                                           double alpha_prime, const WeightSet& wprime) {
  const int s = rule.dimension();
  detail::require_monotone(w, s);
  wprime.require_dimension(s);
  const SpaceParams target(alpha_prime, wprime);
  CertificateComponents comp;
  comp.rho = *zaremba_rho(rule, SpaceParams(alpha, w)).rho_value;
  comp.c_alpha_prime = c_alpha_prime(alpha_prime);
  comp.subset_sum = detail::thm1_subset_sum(w, wprime, s, rule.modulus(), alpha, alpha_prime);
  const double rhs = detail::times_power(comp.c_alpha_prime, comp.rho, alpha_prime / alpha, comp.subset_sum);
  return detail::finish_certificate("thm1", detail::p_upper(rule, target), rhs, comp);
}

/// P_{a',g',b^m}(q) <= rho_{a,g,b^m}(q)^{a'/a} sum_u (g'_u / g_u^{a'/a})
/// (b^{2a'-1}(b-1)/(b^{2a'-1}-1))^{|u|} (m+1)^{|u|-1}.
inline StabilityCertificate theorem2_bound_poly(const PolyLatticeRule& rule, double alpha, const WeightSet& w,
                                                double alpha_prime, const WeightSet& wprime) {
  const int s = rule.dimension();
  w.require_dimension(s);
  wprime.require_dimension(s);
  CertificateComponents comp;
  comp.rho = *rho_wal(rule, SpaceParams(alpha, w)).rho_value;
  comp.c_alpha_prime = 1.0;
  comp.subset_sum = detail::thm2_subset_sum(w, wprime, s, rule.base(), rule.m(), alpha, alpha_prime);
  const double rhs = detail::times_power(1.0, comp.rho, alpha_prime / alpha, comp.subset_sum);
  const double lhs = *p_merit_wal_closed(rule, SpaceParams(alpha_prime, wprime)).p_value;
  return detail::finish_certificate("thm2", lhs, rhs, comp);
}

namespace detail {

inline void require_lambda(double lambda, double alpha) {
  if (!(lambda <= 1.0)) throw UsageError("lambda must not exceed 1");
  if (!(2.0 * alpha * lambda > 1.0)) throw DomainError("lambda must exceed 1/(2 alpha)");
}

}  // namespace detail

/// (1/phi(N) sum_u gamma_u^lambda (2 zeta(2 alpha lambda))^{|u|})^{1/lambda}.
inline double prop_bound_lattice(std::int64_t n, int s, double alpha, const WeightSet& w, double lambda) {
  detail::require_lambda(lambda, alpha);
  return std::pow(weighted_zeta_sum(w, s, lambda, alpha) / static_cast<double>(euler_totient(n)), 1.0 / lambda);
}

/// ((1/(b^m - 1)) sum_u gamma_u^lambda ((b-1)/(b^{2 alpha lambda} - b))^{|u|})^{1/lambda}.
inline double prop_bound_poly(int b, int m, int s, double alpha, const WeightSet& w, double lambda) {
  detail::require_lambda(lambda, alpha);
  if (!is_supported_base(b)) throw UsageError("base must be a prime <= 7");
  if (m < 1) throw UsageError("m must be at least 1");
  w.require_dimension(s);
  const double x = (b - 1) / (std::pow(static_cast<double>(b), 2.0 * alpha * lambda) - b);
  const double sum = weighted_subset_product(w.pow(lambda), std::vector<double>(static_cast<std::size_t>(s), x));
  return std::pow(sum / (static_cast<double>(detail::ipow(b, m)) - 1.0), 1.0 / lambda);
}

/// P of a CBC lattice rule against its construction bound.
inline StabilityCertificate prop_certificate_lattice(const LatticeRule& rule, double alpha, const WeightSet& w,
                                                     double lambda) {
  const double rhs = prop_bound_lattice(rule.modulus(), rule.dimension(), alpha, w, lambda);
  return detail::finish_certificate("prop1", detail::p_upper(rule, SpaceParams(alpha, w)), rhs, {});
}

inline StabilityCertificate prop_certificate_poly(const PolyLatticeRule& rule, double alpha, const WeightSet& w,
                                                  double lambda) {
  const double rhs = prop_bound_poly(rule.base(), rule.m(), rule.dimension(), alpha, w, lambda);
  const double lhs = *p_merit_wal_closed(rule, SpaceParams(alpha, w)).p_value;
  return detail::finish_certificate("prop2", lhs, rhs, {});
}

/// theorem1_bound with rho replaced by the construction bound:
/// rhs = c_{a'} (1/phi(N) sum_u gamma_u^lambda (2 zeta(2 a lambda))^{|u|})^{a'/(a lambda)} * subset sum.
inline StabilityCertificate combined_bound_eq1(const LatticeRule& rule, double alpha, const WeightSet& w,
                                               double alpha_prime, const WeightSet& wprime, double lambda) {
  const int s = rule.dimension();
  detail::require_monotone(w, s);
  wprime.require_dimension(s);
  CertificateComponents comp;
  comp.rho = prop_bound_lattice(rule.modulus(), s, alpha, w, lambda);
  comp.c_alpha_prime = c_alpha_prime(alpha_prime);
  comp.subset_sum = detail::thm1_subset_sum(w, wprime, s, rule.modulus(), alpha, alpha_prime);
  const double rhs = detail::times_power(comp.c_alpha_prime, comp.rho, alpha_prime / alpha, comp.subset_sum);
  return detail::finish_certificate("eq1", detail::p_upper(rule, SpaceParams(alpha_prime, wprime)), rhs, comp);
}

namespace detail {

inline void require_delta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw UsageError("delta must lie in (0, 1]");
}

}  // namespace detail

/// (P_{a/delta, gamma^{1/delta}, N}(z))^delta <= P_{a,gamma,N}(z), 0 < delta <= 1.
/// The left side uses an upper estimate and the right side a lower one when a
/// truncated series is involved.
inline StabilityCertificate jensen_certificate(const LatticeRule& rule, double alpha, const WeightSet& w,
                                               double delta) {
  detail::require_delta(delta);
  const auto rhs_est = p_merit_best(rule, SpaceParams(alpha, w));
  const auto lhs_est = p_merit_best(rule, SpaceParams(alpha / delta, w.pow(1.0 / delta)));
  return detail::finish_certificate("jensen", std::pow(lhs_est.upper, delta), rhs_est.value, {});
}

inline StabilityCertificate jensen_certificate_poly(const PolyLatticeRule& rule, double alpha, const WeightSet& w,
                                                    double delta) {
  detail::require_delta(delta);
  const double rhs = *p_merit_wal_closed(rule, SpaceParams(alpha, w)).p_value;
  const double lhs = *p_merit_wal_closed(rule, SpaceParams(alpha / delta, w.pow(1.0 / delta))).p_value;
  return detail::finish_certificate("jensen", std::pow(lhs, delta), rhs, {});
}

/// (1/N)(e^gamma log log N + 2.50637 / log log N), an upper bound on 1/phi(N) for N >= 3.
inline double rosser_schoenfeld_bound(std::int64_t n) {
  if (n < 3) throw UsageError("Rosser-Schoenfeld bound needs N >= 3");
  const double ll = std::log(std::log(static_cast<double>(n)));
  return (std::exp(0.5772156649) * ll + 2.50637 / ll) / static_cast<double>(n);
}

inline bool rosser_schoenfeld_holds(std::int64_t n) {
  return 1.0 / static_cast<double>(euler_totient(n)) < rosser_schoenfeld_bound(n);
}

enum class CorollaryKind { Cor1, Cor2, Cor3, Cor4 };

inline const char* to_string(CorollaryKind k) {
  switch (k) {
    case CorollaryKind::Cor1: return "cor1";
    case CorollaryKind::Cor2: return "cor2";
    case CorollaryKind::Cor3: return "cor3";
    case CorollaryKind::Cor4: return "cor4";
  }
  return "?";
}

/// Exponents and weights for a finite-grid look at one of the tractability corollaries.
struct CorollaryProbe {
  double alpha = 1.0;
  double alpha_prime = 1.0;
  double lambda = 1.0;
  double delta = 0.1;
  double q = 0.0;
  double q_prime = 0.0;
  double q_dprime = 0.0;
  WeightSet weights = WeightSet::constant(WeightSet::kDefaultMaxDim);
  WeightSet weights_prime = WeightSet::constant(WeightSet::kDefaultMaxDim);
  int base = 2;
};

/// One grid cell. sup_terms are the quantities inside the corollary's sup
/// conditions; observed is the quantity being bounded on the CBC rule (NaN if
/// out of reach); rate is the s- and N-dependence of the bound; bound = C * rate
/// with C the largest observed ratio.
struct ProbeRow {
  int s = 0;
  std::int64_t n_or_m = 0;
  std::vector<double> sup_terms;
  double observed = std::numeric_limits<double>::quiet_NaN();
  double rate = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
};

struct ProbeTable {
  CorollaryKind kind;
  std::vector<ProbeRow> rows;
  double constant = 0.0;
};

namespace detail {

inline constexpr int kProbeMaxDim = 20;

inline double subset_sum(int s, const std::function<double(CoordSet)>& f) {
  double total = 0.0;
  for_each_nonempty_subset(s, [&](CoordSet u) { total += f(u); });
  return total;
}

inline ProbeRow probe_cell(CorollaryKind kind, const CorollaryProbe& pr, int s, std::int64_t size) {
  ProbeRow row;
  row.s = s;
  row.n_or_m = size;
  const double a = pr.alpha, ap = pr.alpha_prime, lam = pr.lambda, del = pr.delta;
  const WeightSet& w = pr.weights;
  const WeightSet& wp = pr.weights_prime;
  const double sd = static_cast<double>(s);
  const bool lattice = kind == CorollaryKind::Cor1 || kind == CorollaryKind::Cor2;
  const bool error_kind = kind == CorollaryKind::Cor1 || kind == CorollaryKind::Cor3;
  const int b = pr.base;
  const int m = lattice ? 0 : static_cast<int>(size);

  // first summability term
  if (lattice) {
    row.sup_terms.push_back(std::pow(sd, -pr.q) * weighted_zeta_sum(w, s, lam, a));
  } else {
    const double x = (b - 1) / (std::pow(static_cast<double>(b), 2.0 * a * lam) - b);
    row.sup_terms.push_back(std::pow(sd, -pr.q) *
                            weighted_subset_product(w.pow(lam), std::vector<double>(static_cast<std::size_t>(s), x)));
  }
  // N-dependent scale: phi(N) for lattices, b^m for polynomial lattices
  const double scale = lattice ? static_cast<double>(euler_totient(size))
                               : std::pow(static_cast<double>(b), static_cast<double>(m));
  if (error_kind) {
    const double sum = lattice ? thm1_subset_sum(w, wp, s, size, a, ap) : thm2_subset_sum(w, wp, s, b, m, a, ap);
    row.sup_terms.push_back(std::pow(sd, -pr.q_prime) * std::pow(scale, -del) * sum);
    row.rate = std::pow(sd, pr.q * ap / (a * lam) + pr.q_prime) * std::pow(scale, -ap / (a * lam) + del);
  } else {
    row.sup_terms.push_back(std::pow(sd, -pr.q_prime) * subset_sum(s, [&](CoordSet u) { return wp.weight(u) * u.size(); }));
    const double lg = std::log2(static_cast<double>(size));
    const double kb = lattice ? 0.0 : k_b_constant(b);
    const double sum = ratio_subset_sum(w, wp, s, 1.0 / (2.0 * a), [&](int d) {
      return lattice ? std::pow(2.0 * lg, d) : std::pow(kb * (m + 1), d);
    });
    row.sup_terms.push_back(std::pow(sd, -pr.q_dprime) * std::pow(scale, -del) * sum);
    row.rate = std::pow(sd, std::max(pr.q_prime, pr.q / (2.0 * a * lam) + pr.q_dprime)) *
               std::pow(scale, -1.0 / (2.0 * a * lam) + del);
  }

  try {
    const SpaceParams build(a, w.truncated(s));
    const WeightSet wp_s = wp.truncated(s);
    switch (kind) {
      case CorollaryKind::Cor1: {
        const auto rule = cbc_construct(size, s, build).first;
        row.observed = p_merit_best(rule, SpaceParams(ap, wp_s)).upper;
        break;
      }
      case CorollaryKind::Cor2: {
        const auto rule = cbc_construct(size, s, build).first;
        row.observed = *star_disc_bound_rho_lattice(rule, a, build.weights, wp_s).bound_rho;
        break;
      }
      case CorollaryKind::Cor3: {
        const auto res = cbc_construct_poly(smallest_irreducible(b, m), s, build);
        row.observed = *p_merit_wal_closed(res.rule, SpaceParams(ap, wp_s)).p_value;
        break;
      }
      case CorollaryKind::Cor4: {
        const auto res = cbc_construct_poly(smallest_irreducible(b, m), s, build);
        row.observed = *star_disc_bound_rho_poly(res.rule, a, build.weights, wp_s).bound_rho;
        break;
      }
    }
  } catch (const ResourceError&) {
    // observed stays NaN: the cell is reported with its sup terms only
  }
  if (!std::isnan(row.observed) && row.rate > 0.0) row.ratio = row.observed / row.rate;
  return row;
}

}  // namespace detail

/// Evaluates the corollary's finite quantities on every (s, N) or (s, m) cell.
/// Nothing is asserted: the table reports sup terms, observed values, and
/// C * rate with C the largest observed ratio.
inline ProbeTable corollary_probe(CorollaryKind kind, const CorollaryProbe& probe,
                                  const std::vector<std::pair<int, std::int64_t>>& grid) {
  const double a = probe.alpha, ap = probe.alpha_prime, lam = probe.lambda;
  if (!(a > 0.5) || !(ap > 0.5)) throw DomainError("alpha and alpha' must exceed 1/2");
  detail::require_lambda(lam, a);
  const bool error_kind = kind == CorollaryKind::Cor1 || kind == CorollaryKind::Cor3;
  const double cap = error_kind ? ap / (a * lam) : 1.0 / (a * lam);
  if (!(probe.delta > 0.0 && probe.delta < cap)) throw UsageError("delta outside the corollary's range");
  if (probe.q < 0 || probe.q_prime < 0 || probe.q_dprime < 0) throw UsageError("q exponents must be nonnegative");
  for (const auto& [s, size] : grid) {
    if (s < 1 || s > detail::kProbeMaxDim) throw ResourceError("probe dimension must lie in 1..20");
    probe.weights.require_dimension(s);
    probe.weights_prime.require_dimension(s);
    const bool lattice = kind == CorollaryKind::Cor1 || kind == CorollaryKind::Cor2;
    if (lattice && size < 2) throw UsageError("probe N must be at least 2");
    if (!lattice && (size < 1 || size > 20)) throw UsageError("probe m must lie in 1..20");
  }

  ProbeTable table{kind, std::vector<ProbeRow>(grid.size()), 0.0};
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    table.rows[i] = detail::probe_cell(kind, probe, grid[i].first, grid[i].second);
  });
  for (const auto& row : table.rows) {
    if (!std::isnan(row.ratio)) table.constant = std::max(table.constant, row.ratio);
  }
  for (auto& row : table.rows) row.bound = table.constant * row.rate;
  return table;
}

}  // namespace qmcforge
