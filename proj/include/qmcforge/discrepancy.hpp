#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "qmcforge/korobov_merit.hpp"
#include "qmcforge/lattice.hpp"
#include "qmcforge/walsh_merit.hpp"
#include "qmcforge/weights.hpp"

namespace qmcforge {

/// Upper bounds on the weighted star discrepancy of one rule, and the exact
/// value where it is computable.
struct DiscrepancyReport {
  std::optional<double> bound_joe;
  std::optional<double> bound_rho;
  std::optional<double> exact_dstar;
  bool bound_rho_infinite = false;
  std::vector<std::pair<CoordSet, double>> r_values;
};

namespace detail {

inline constexpr std::int64_t kMaxDiscModulus = 256;

inline void require_discrepancy_subset(CoordSet u, int s) {
  if (u.empty()) throw UsageError("coordinate subset must be nonempty");
  if (u.max_coord() > s) throw UsageError("coordinate subset exceeds the dimension");
  if (u.size() > 3) throw ResourceError("R sums limited to |u| <= 3");
}

inline double one_minus_power(double n, int d) { return 1.0 - std::pow(1.0 - 1.0 / n, d); }

}  // namespace detail

/// R_{u,N}(z): sum over nonzero k_u in the box -N/2 < k_j <= N/2 with
/// (k_u, 0) . z = 0 mod N of prod 1 / max(1, |k_j|), by full box enumeration.
inline double r_u_lattice(const LatticeRule& rule, CoordSet u) {
  detail::require_discrepancy_subset(u, rule.dimension());
  const std::int64_t n = rule.modulus();
  if (n > detail::kMaxDiscModulus) throw ResourceError("R_{u,N} limited to N <= 256");
  const std::int64_t lo = -((n - 1) / 2), hi = n / 2;
  const auto coords = u.coords();
  const int d = static_cast<int>(coords.size());
  double total = 0.0;
  auto recurse = [&](auto&& self, int i, std::int64_t residue, double w, bool nonzero) -> void {
    if (i == d) {
      if (nonzero && residue == 0) total += w;
      return;
    }
    const std::int64_t zj = rule.generator()[coords[i] - 1];
    for (std::int64_t k = lo; k <= hi; ++k) {
      const std::int64_t r = ((residue + k * zj) % n + n) % n;
      self(self, i + 1, r, w / static_cast<double>(std::max<std::int64_t>(1, std::abs(k))), nonzero || k != 0);
    }
  };
  recurse(recurse, 0, 0, 1.0, false);
  return total;
}

/// sum_u gamma_u [1 - (1 - 1/N)^{|u|} + R_{u,N}(z) / 2].
inline DiscrepancyReport star_disc_bound_lattice(const LatticeRule& rule, const WeightSet& w) {
  const int s = rule.dimension();
  if (s > 3) throw ResourceError("lattice discrepancy bound limited to s <= 3");
  w.require_dimension(s);
  DiscrepancyReport rep;
  double total = 0.0;
  const double n = static_cast<double>(rule.modulus());
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const double r = r_u_lattice(rule, u);
    rep.r_values.emplace_back(u, r);
    total += w.weight(u) * (detail::one_minus_power(n, u.size()) + r / 2.0);
  });
  rep.bound_joe = total;
  return rep;
}

namespace detail {

inline void require_monotone(const WeightSet& w, int s) {
  if (!check_monotone(w, s)) throw UsageError("weights must satisfy gamma_v >= gamma_u for v subset of u");
}

}  // namespace detail

/// rho-based bound: sum_u gamma'_u [1 - (1-1/N)^{|u|} + rho^{1/(2 alpha)} / (2 gamma_u^{1/(2 alpha)})
/// (log 2 (log2 N)^{|u|} + 3 (2 log2 N)^{|u|-1})], rho = rho_{alpha,gamma,N}(z).
/// gamma_u = 0 < gamma'_u makes the bound infinite (flagged).
inline DiscrepancyReport star_disc_bound_rho_lattice(const LatticeRule& rule, double alpha, const WeightSet& w,
                                                     const WeightSet& wprime) {
  const int s = rule.dimension();
  detail::require_monotone(w, s);
  wprime.require_dimension(s);
  const double rho = *zaremba_rho(rule, SpaceParams{alpha, w}).rho_value;
  const double n = static_cast<double>(rule.modulus());
  const double lg = std::log2(n);
  const double rho_root = std::pow(rho, 1.0 / (2.0 * alpha));
  DiscrepancyReport rep;
  double total = 0.0;
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const double gp = wprime.weight(u);
    if (gp == 0.0) return;
    const double g = w.weight(u);
    if (g == 0.0) {
      rep.bound_rho_infinite = true;
      return;
    }
    const int d = u.size();
    const double log_term = std::numbers::ln2 * std::pow(lg, d) + 3.0 * std::pow(2.0 * lg, d - 1);
    total += gp * (detail::one_minus_power(n, d) + rho_root / (2.0 * std::pow(g, 1.0 / (2.0 * alpha))) * log_term);
  });
  rep.bound_rho = rep.bound_rho_infinite ? std::numeric_limits<double>::infinity() : total;
  return rep;
}

/// r~(k) = 1 / (b^a sin(pi kappa_{a-1} / b)) with a = mu(k) and kappa_{a-1} the leading digit; r~(0) = 1.
inline double r_tilde(std::int64_t k, int b) {
  if (k < 0) throw UsageError("r_tilde: k must be nonnegative");
  if (k == 0) return 1.0;
  const int a = mu_of(k, b);
  const std::int64_t lead = k / detail::ipow(b, a - 1);
  return 1.0 / (std::pow(static_cast<double>(b), a) * std::sin(std::numbers::pi * static_cast<double>(lead) / b));
}

/// R_{u,b^m}(q): sum over nonzero k_u with 0 <= k_j < b^m in the dual of prod r~(k_j).
inline double r_u_poly(const PolyLatticeRule& rule, CoordSet u) {
  detail::require_discrepancy_subset(u, rule.dimension());
  const int b = rule.base();
  const std::int64_t size = rule.size();
  const auto coords = u.coords();
  const int d = static_cast<int>(coords.size());
  if (std::pow(static_cast<double>(size), d) > 1e8) throw ResourceError("R_{u,b^m} enumeration too large");
  std::vector<std::vector<std::int64_t>> prod;
  for (int c : coords) prod.push_back(detail::product_table(rule, c - 1));
  std::vector<double> rt(static_cast<std::size_t>(size));
  for (std::int64_t k = 0; k < size; ++k) rt[k] = r_tilde(k, b);

  double total = 0.0;
  auto recurse = [&](auto&& self, int i, std::int64_t acc, double w, bool nonzero) -> void {
    if (i == d) {
      if (nonzero && acc == 0) total += w;
      return;
    }
    for (std::int64_t k = 0; k < size; ++k) {
      self(self, i + 1, detail::digit_add(acc, prod[i][k], b), w * rt[k], nonzero || k != 0);
    }
  };
  recurse(recurse, 0, 0, 1.0, false);
  return total;
}

/// sum_u gamma_u [1 - (1 - 1/N)^{|u|} + R_{u,b^m}(q)] with N = b^m.
inline DiscrepancyReport star_disc_bound_poly(const PolyLatticeRule& rule, const WeightSet& w) {
  const int s = rule.dimension();
  if (s > 3) throw ResourceError("polynomial lattice discrepancy bound limited to s <= 3");
  w.require_dimension(s);
  DiscrepancyReport rep;
  double total = 0.0;
  const double n = static_cast<double>(rule.size());
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const double r = r_u_poly(rule, u);
    rep.r_values.emplace_back(u, r);
    total += w.weight(u) * (detail::one_minus_power(n, u.size()) + r);
  });
  rep.bound_joe = total;
  return rep;
}

/// k_2 = 1, k_b = 1 + 1/sin(pi/b) for odd prime b.
inline double k_b_constant(int b) {
  if (!is_supported_base(b)) throw UsageError("base must be a prime <= 7");
  return b == 2 ? 1.0 : 1.0 + 1.0 / std::sin(std::numbers::pi / b);
}

/// sum_u gamma'_u [1 - (1-1/N)^{|u|} + (b-1) rho^{1/(2 alpha)} / gamma_u^{1/(2 alpha)} (k_b (m+1))^{|u|}], N = b^m.
inline DiscrepancyReport star_disc_bound_rho_poly(const PolyLatticeRule& rule, double alpha, const WeightSet& w,
                                                  const WeightSet& wprime) {
  const int s = rule.dimension();
  detail::require_monotone(w, s);
  wprime.require_dimension(s);
  const int b = rule.base(), m = rule.m();
  const double rho = *rho_wal(rule, SpaceParams{alpha, w}).rho_value;
  const double rho_root = std::pow(rho, 1.0 / (2.0 * alpha));
  const double n = static_cast<double>(rule.size());
  const double kb = k_b_constant(b);
  DiscrepancyReport rep;
  double total = 0.0;
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const double gp = wprime.weight(u);
    if (gp == 0.0) return;
    const double g = w.weight(u);
    if (g == 0.0) {
      rep.bound_rho_infinite = true;
      return;
    }
    const int d = u.size();
    total += gp * (detail::one_minus_power(n, d) +
                   (b - 1) * rho_root / std::pow(g, 1.0 / (2.0 * alpha)) * std::pow(kb * (m + 1), d));
  });
  rep.bound_rho = rep.bound_rho_infinite ? std::numeric_limits<double>::infinity() : total;
  return rep;
}

/// sup over anchored boxes [0, y) of |local discrepancy|, for s <= 2 and at most
/// 256 points. Each y_j ranges over the point coordinates and 1; at each grid
/// value both the strict count (box [0,y)) and the closed count (limit from the
/// right) are compared against the volume. Exact integer arithmetic.
inline double exact_star_discrepancy(const PointSet& pts) {
  const int s = pts.dimension;
  if (s < 1 || s > 2) throw UnsupportedError("exact star discrepancy supports s in {1, 2}");
  const auto npts = static_cast<std::int64_t>(pts.size());
  if (npts < 1) throw UsageError("point set is empty");
  if (npts > 256) throw ResourceError("exact star discrepancy limited to 256 points");
  const std::int64_t den = pts.denominator;

  std::vector<std::vector<std::int64_t>> grid(static_cast<std::size_t>(s));
  for (int j = 0; j < s; ++j) {
    for (const auto& row : pts.numerators) grid[j].push_back(row[j]);
    grid[j].push_back(den);
    std::sort(grid[j].begin(), grid[j].end());
    grid[j].erase(std::unique(grid[j].begin(), grid[j].end()), grid[j].end());
  }
  // discrepancy values are rationals with denominator npts * den^s
  std::int64_t den_s = 1;
  for (int j = 0; j < s; ++j) den_s *= den;
  std::int64_t best = 0;
  std::vector<std::int64_t> y(static_cast<std::size_t>(s));
  auto evaluate = [&] {
    std::int64_t open = 0, closed = 0;
    for (const auto& row : pts.numerators) {
      bool in_open = true, in_closed = true;
      for (int j = 0; j < s; ++j) {
        in_open = in_open && row[j] < y[j];
        in_closed = in_closed && row[j] <= y[j];
      }
      open += in_open;
      closed += in_closed;
    }
    std::int64_t vol = 1;
    for (int j = 0; j < s; ++j) vol *= y[j];
    best = std::max({best, vol * npts - open * den_s, closed * den_s - vol * npts});
  };
  if (s == 1) {
    for (auto a : grid[0]) {
      y[0] = a;
      evaluate();
    }
  } else {
    for (auto a : grid[0]) {
      for (auto c : grid[1]) {
        y[0] = a;
        y[1] = c;
        evaluate();
      }
    }
  }
  return static_cast<double>(best) / (static_cast<double>(npts) * static_cast<double>(den_s));
}

/// max_u gamma_u D*(P_u) over nonempty u with |u| <= 2 (s <= 2).
inline double weighted_exact_star_discrepancy(const PointSet& pts, const WeightSet& w) {
  const int s = pts.dimension;
  if (s > 2) throw UnsupportedError("exact star discrepancy supports s in {1, 2}");
  w.require_dimension(s);
  double best = 0.0;
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const double g = w.weight(u);
    if (g == 0.0) return;
    PointSet proj{pts.denominator, u.size(), {}};
    const auto coords = u.coords();
    for (const auto& row : pts.numerators) {
      std::vector<std::int64_t> r;
      for (int c : coords) r.push_back(row[c - 1]);
      proj.numerators.push_back(std::move(r));
    }
    best = std::max(best, g * exact_star_discrepancy(proj));
  });
  return best;
}

}  // namespace qmcforge
