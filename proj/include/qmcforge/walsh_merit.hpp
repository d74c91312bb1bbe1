#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qmcforge/detail/parallel.hpp"
#include "qmcforge/gf_poly.hpp"
#include "qmcforge/lattice.hpp"
#include "qmcforge/lattice_cbc.hpp"
#include "qmcforge/merit_report.hpp"
#include "qmcforge/subset_sums.hpp"
#include "qmcforge/weights.hpp"

namespace qmcforge {

namespace detail {

inline constexpr std::int64_t kMaxPolyPoints = std::int64_t{1} << 20;

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t v = 1;
  for (int i = 0; i < e; ++i) v *= b;
  return v;
}

// Digit-wise sum mod b of two base-b encodings.
inline std::int64_t digit_add(std::int64_t a, std::int64_t c, int b) {
  if (b == 2) return a ^ c;
  std::int64_t out = 0, place = 1;
  while (a > 0 || c > 0) {
    out += ((a % b + c % b) % b) * place;
    a /= b;
    c /= b;
    place *= b;
  }
  return out;
}

inline std::int64_t digit_scale(std::int64_t a, int k, int b) {
  if (k % b == 0) return 0;
  if (b == 2) return a;
  std::int64_t out = 0, place = 1;
  for (; a > 0; a /= b, place *= b) out += ((a % b) * k % b) * place;
  return out;
}

}  // namespace detail

/// Polynomial lattice rule over Z_b: modulus p of degree m and generating
/// vector q of nonzero polynomials of degree < m.
class PolyLatticeRule {
 public:
  PolyLatticeRule(GFPoly p, std::vector<GFPoly> q) : p_(std::move(p)), q_(std::move(q)) {
    if (p_.degree() < 1) throw UsageError("modulus polynomial must have degree >= 1");
    if (q_.empty()) throw UsageError("generating vector must be nonempty");
    if (detail::ipow(p_.base(), p_.degree()) > detail::kMaxPolyPoints) {
      throw ResourceError("polynomial lattice limited to b^m <= 2^20 points");
    }
    for (const auto& qj : q_) {
      if (qj.base() != p_.base()) throw UsageError("generating polynomial has a different base");
      if (qj.is_zero()) throw UsageError("generating polynomials must be nonzero");
      if (qj.degree() >= p_.degree()) throw UsageError("generating polynomials must have degree < m");
    }
  }

  int base() const { return p_.base(); }
  int m() const { return p_.degree(); }
  int dimension() const { return static_cast<int>(q_.size()); }
  std::int64_t size() const { return detail::ipow(base(), m()); }
  const GFPoly& modulus() const { return p_; }
  const std::vector<GFPoly>& generator() const { return q_; }

 private:
  GFPoly p_;
  std::vector<GFPoly> q_;
};

/// Points nu_m(n q_j / p) for every n in G_m (n in index order), as numerators over b^m.
inline PointSet poly_lattice_points(const PolyLatticeRule& rule) {
  const int b = rule.base(), m = rule.m(), s = rule.dimension();
  PointSet pts{rule.size(), s, {}};
  pts.numerators.reserve(static_cast<std::size_t>(rule.size()));
  for (std::int64_t idx = 0; idx < rule.size(); ++idx) {
    const GFPoly n = GFPoly::from_index(idx, b);
    std::vector<std::int64_t> row(static_cast<std::size_t>(s));
    for (int j = 0; j < s; ++j) row[j] = nu_m(gf_mulmod(n, rule.generator()[j], rule.modulus()), rule.modulus(), m).numerator();
    pts.numerators.push_back(std::move(row));
  }
  return pts;
}

/// Number of base-b digits of k >= 1.
inline int mu_of(std::int64_t k, int b) {
  if (k < 1) throw DomainError("mu(k) is defined for k >= 1");
  int a = 0;
  for (; k > 0; k /= b) ++a;
  return a;
}

/// phi_alpha(x) for x = numerator / b^m, with the first nonzero digit position read exactly.
inline double walsh_phi_alpha(std::int64_t numerator, int m, double alpha, int b) {
  if (!(alpha > 0.5)) throw DomainError("walsh_phi_alpha needs alpha > 1/2");
  const double b2a = std::pow(static_cast<double>(b), 2.0 * alpha);
  const double at_zero = (b - 1) / (b2a - b);
  if (numerator == 0) return at_zero;
  const int a = m - mu_of(numerator, b) + 1;
  return at_zero - (b2a - 1.0) / (std::pow(static_cast<double>(b), (2.0 * alpha - 1.0) * a) * (b2a - b));
}

inline double walsh_phi_alpha(const DigitExpansion& x, double alpha) {
  return walsh_phi_alpha(x.numerator(), x.m(), alpha, x.base);
}

/// phi_alpha(r / b^m) for r = 0..b^m-1.
inline std::vector<double> walsh_kernel_table(int b, int m, double alpha) {
  const std::int64_t size = detail::ipow(b, m);
  std::vector<double> table(static_cast<std::size_t>(size));
  for (std::int64_t r = 0; r < size; ++r) table[r] = walsh_phi_alpha(r, m, alpha, b);
  return table;
}

/// P_{alpha,gamma,b^m}(q) via the phi_alpha closed form; valid for every alpha > 1/2.
inline MeritReport p_merit_wal_closed(const PolyLatticeRule& rule, const SpaceParams& params, bool per_subset = false,
                                      bool enumerate_subsets = false) {
  return detail::closed_form_merit(poly_lattice_points(rule), params.weights,
                                   walsh_kernel_table(rule.base(), rule.m(), params.alpha), per_subset,
                                   enumerate_subsets);
}

namespace detail {

// index of (r q_j mod p) for every residue polynomial r of degree < m.
inline std::vector<std::int64_t> product_table(const PolyLatticeRule& rule, int j) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(rule.size()));
  for (std::int64_t r = 0; r < rule.size(); ++r) {
    out[r] = gf_mulmod(GFPoly::from_index(r, rule.base()), rule.generator()[j], rule.modulus()).index();
  }
  return out;
}

inline constexpr double kPolySeriesMaxWork = 1e8;

}  // namespace detail

/// P_{alpha,gamma,b^m}(q) as the dual series, over all k_u with 1 <= k_j < b^digit_cap.
/// Membership tr_m(k_u) . q_u = 0 mod p depends only on k_j mod b^m, so the
/// terms are grouped by residue and the last residue is solved for.
inline MeritReport p_merit_wal_series(const PolyLatticeRule& rule, const SpaceParams& params, int digit_cap,
                                      bool per_subset = false) {
  const int b = rule.base(), s = rule.dimension();
  if (digit_cap < 1) throw UsageError("digit_cap must be at least 1");
  if (s > 30) throw ResourceError("series limited to s <= 30");
  params.weights.require_dimension(s);
  const double alpha = params.alpha;
  const std::int64_t size = rule.size();
  if (static_cast<double>(digit_cap) * std::log2(static_cast<double>(b)) > 40.0) {
    throw ResourceError("digit_cap too large");
  }
  if (std::pow(static_cast<double>(size), s - 1) * std::exp2(s) > detail::kPolySeriesMaxWork) {
    throw ResourceError("series enumeration exceeds 1e8 terms");
  }

  // per-residue sums of b^{-2 alpha mu(k)} over 1 <= k < b^cap
  std::vector<double> by_residue(static_cast<std::size_t>(size), 0.0);
  double capped = 0.0;
  for (int a = digit_cap; a >= 1; --a) {
    const double term = std::pow(static_cast<double>(b), -2.0 * alpha * a);
    const std::int64_t lo = detail::ipow(b, a - 1), hi = detail::ipow(b, a);
    capped += static_cast<double>(hi - lo) * term;
    if (hi - lo >= size) {
      // every residue receives (hi - lo) / size terms
      const double each = static_cast<double>((hi - lo) / size) * term;
      for (auto& v : by_residue) v += each;
    } else {
      for (std::int64_t k = lo; k < hi; ++k) by_residue[k % size] += term;
    }
  }
  const double full = 1.0 + (b - 1) / (std::pow(static_cast<double>(b), 2.0 * alpha) - b);
  const double partial = 1.0 + capped;

  std::vector<std::vector<std::int64_t>> prod(static_cast<std::size_t>(s));
  for (int j = 0; j < s; ++j) prod[j] = detail::product_table(rule, j);

  MeritReport report;
  report.method = MeritMethod::TruncatedSeries;
  double total = 0.0, tail = 0.0;
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const auto coords = u.coords();
    const int d = static_cast<int>(coords.size());
    const auto& last = prod[coords.back() - 1];
    std::vector<double> last_sum(static_cast<std::size_t>(size), 0.0);
    for (std::int64_t r = 0; r < size; ++r) last_sum[last[r]] += by_residue[r];

    double inner = 0.0;
    auto recurse = [&](auto&& self, int i, std::int64_t acc, double w) -> void {
      if (i == d - 1) {
        // need last product = -acc; negation digit-wise
        inner += w * last_sum[detail::digit_scale(acc, b - 1, b)];
        return;
      }
      const auto& pj = prod[coords[i] - 1];
      for (std::int64_t r = 0; r < size; ++r) {
        if (by_residue[r] == 0.0) continue;
        self(self, i + 1, detail::digit_add(acc, pj[r], b), w * by_residue[r]);
      }
    };
    recurse(recurse, 0, 0, 1.0);
    const double g = params.weights.weight(u);
    total += g * inner;
    tail += g * std::max(0.0, std::pow(full, d) - std::pow(partial, d));
    if (per_subset) report.per_subset.push_back({u, inner, std::nullopt, std::nullopt});
  });
  report.p_value = total;
  report.truncation_bound = tail;
  return report;
}

namespace detail {

// phi_u(q) = min mu(k_u) over duals with every k_j >= 1. The minimal k in residue
// class r is r itself (mu(r)) or b^m for r = 0 (mu = m + 1).
inline int minimal_walsh_size(const PolyLatticeRule& rule, CoordSet u,
                              const std::vector<std::vector<std::int64_t>>& prod) {
  const int b = rule.base(), m = rule.m();
  const std::int64_t size = rule.size();
  const auto coords = u.coords();
  const int d = static_cast<int>(coords.size());
  if (std::pow(static_cast<double>(size), d - 1) > 2e8) throw ResourceError("rho_wal enumeration too large");

  std::vector<int> mu_min(static_cast<std::size_t>(size));
  mu_min[0] = m + 1;
  for (std::int64_t r = 1; r < size; ++r) mu_min[r] = mu_of(r, b);
  std::vector<std::int64_t> order(static_cast<std::size_t>(size));
  for (std::int64_t r = 0; r < size; ++r) order[r] = r;
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return mu_min[x] < mu_min[y]; });

  constexpr int kNone = std::numeric_limits<int>::max() / 2;
  std::vector<int> last_min(static_cast<std::size_t>(size), kNone);
  const auto& last = prod[coords.back() - 1];
  for (std::int64_t r = 0; r < size; ++r) last_min[last[r]] = std::min(last_min[last[r]], mu_min[r]);

  int best = kNone;
  auto recurse = [&](auto&& self, int i, std::int64_t acc, int partial) -> void {
    if (i == d - 1) {
      const int t = last_min[digit_scale(acc, b - 1, b)];
      if (t != kNone) best = std::min(best, partial + t);
      return;
    }
    const auto& pj = prod[coords[i] - 1];
    for (std::int64_t r : order) {
      if (partial + mu_min[r] + (d - 1 - i) >= best) break;
      self(self, i + 1, digit_add(acc, pj[r], b), partial + mu_min[r]);
    }
  };
  recurse(recurse, 0, 0, 0);
  return best;
}

}  // namespace detail

/// rho_{alpha,gamma,b^m}(q) = max_u gamma_u b^{-2 alpha phi_u(q)}, with phi_u and
/// phi_{u,0} (zeros allowed) per subset. Checks |u| <= phi_u, and phi_u <= m + |u|
/// when p is irreducible.
inline MeritReport rho_wal(const PolyLatticeRule& rule, const SpaceParams& params) {
  const int s = rule.dimension();
  if (s > 12) throw ResourceError("rho_wal limited to s <= 12");
  params.weights.require_dimension(s);
  std::vector<std::vector<std::int64_t>> prod(static_cast<std::size_t>(s));
  for (int j = 0; j < s; ++j) prod[j] = detail::product_table(rule, j);
  const bool irreducible = gf_is_irreducible(rule.modulus());

  std::map<std::uint64_t, std::int64_t> phi;
  double rho = 0.0;
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const int ph = detail::minimal_walsh_size(rule, u, prod);
    const int d = u.size();
    if (ph < d) throw std::logic_error("rho_wal: phi_u below |u|");
    if (irreducible && ph > rule.m() + d) throw std::logic_error("rho_wal: phi_u exceeds m + |u|");
    phi[u.mask()] = ph;
    const double g = params.weights.weight(u);
    rho = std::max(rho, g * std::pow(static_cast<double>(rule.base()), -2.0 * params.alpha * ph));
  });
  MeritReport report;
  for_each_nonempty_subset(s, [&](CoordSet u) {
    std::int64_t ph0 = std::numeric_limits<std::int64_t>::max();
    for (std::uint64_t v = u.mask(); v; v = (v - 1) & u.mask()) ph0 = std::min(ph0, phi[v]);
    report.per_subset.push_back({u, std::nullopt, phi[u.mask()], ph0});
  });
  report.rho_value = rho;
  return report;
}

namespace detail {

// Numerators of one coordinate for n = 0..b^m-1, using linearity of n -> nu_m(n q / p)
// over Z_b: column[n] is built from column[n - d b^t] and the image of x^t.
inline std::vector<std::int64_t> poly_column(const GFPoly& p, const GFPoly& q) {
  const int b = p.base(), m = p.degree();
  const std::int64_t size = ipow(b, m);
  std::vector<std::int64_t> basis(static_cast<std::size_t>(m));
  for (int t = 0; t < m; ++t) basis[t] = nu_m(gf_mulmod(GFPoly::monomial(b, t), q, p), p, m).numerator();
  std::vector<std::int64_t> col(static_cast<std::size_t>(size), 0);
  std::int64_t place = 1;
  int t = 0;
  for (std::int64_t n = 1; n < size; ++n) {
    if (n == place * b) {
      place *= b;
      ++t;
    }
    const int digit = static_cast<int>(n / place);
    col[n] = digit_add(col[n - digit * place], digit_scale(basis[t], digit, b), b);
  }
  return col;
}

}  // namespace detail

struct PolyCbcResult {
  PolyLatticeRule rule;
  CbcTrace trace;
  bool modulus_irreducible;  // false: the construction bound is not certified for this rule
};

/// Component-by-component construction of a polynomial lattice rule: q_1 = 1,
/// then each q_{l+1} minimizes the Walsh merit over all nonzero polynomials of
/// degree < m, ties to the smallest integer encoding.
inline PolyCbcResult cbc_construct_poly(const GFPoly& p, int s, const SpaceParams& params) {
  const int b = p.base(), m = p.degree();
  if (m < 1) throw UsageError("cbc_construct_poly: deg p must be >= 1");
  if (s < 1) throw UsageError("cbc_construct_poly: s must be >= 1");
  params.weights.require_dimension(s);
  if (params.weights.kind() == WeightKind::Explicit && s > 12) {
    throw ResourceError("cbc_construct_poly: explicit weights limited to s <= 12");
  }
  const std::int64_t size = detail::ipow(b, m);
  if (size > detail::kMaxPolyPoints) throw ResourceError("polynomial lattice limited to b^m <= 2^20 points");
  const std::vector<double> kernel = walsh_kernel_table(b, m, params.alpha);

  PointSet pts{size, 1, std::vector<std::vector<std::int64_t>>(static_cast<std::size_t>(size))};
  auto append_column = [&](PointSet& target, const std::vector<std::int64_t>& col) {
    for (std::int64_t n = 0; n < size; ++n) target.numerators[n].push_back(col[n]);
  };
  append_column(pts, detail::poly_column(p, GFPoly::one(b)));

  std::vector<GFPoly> q{GFPoly::one(b)};
  CbcTrace trace;
  trace.steps.push_back({1, *detail::closed_form_merit(pts, params.weights, kernel, false).p_value});
  trace.evaluations = 1;

  std::vector<double> values(static_cast<std::size_t>(size - 1));
  for (int dim = 2; dim <= s; ++dim) {
    detail::parallel_for(values.size(), [&](std::size_t i) {
      const auto col = detail::poly_column(p, GFPoly::from_index(static_cast<std::int64_t>(i) + 1, b));
      PointSet cand = pts;
      cand.dimension = dim;
      append_column(cand, col);
      values[i] = *detail::closed_form_merit(cand, params.weights, kernel, false).p_value;
    });
    trace.evaluations += static_cast<std::int64_t>(values.size());
    const std::size_t best = tie_break_argmin(values);
    const std::int64_t chosen = static_cast<std::int64_t>(best) + 1;
    q.push_back(GFPoly::from_index(chosen, b));
    pts.dimension = dim;
    append_column(pts, detail::poly_column(p, q.back()));
    trace.steps.push_back({chosen, values[best]});
  }
  const bool irreducible = gf_is_irreducible(p);
  return {PolyLatticeRule(p, std::move(q)), std::move(trace), irreducible};
}

/// (1/b^m) sum_{x in P} wal_k(x), with wal_k(x) = omega_b^{sum_i kappa_i xi_{i+1}}.
inline std::complex<double> walsh_char_sum(const PolyLatticeRule& rule, const std::vector<std::int64_t>& k) {
  const int b = rule.base(), m = rule.m(), s = rule.dimension();
  if (static_cast<int>(k.size()) != s) throw UsageError("walsh_char_sum: k must have s components");
  for (auto kj : k) {
    if (kj < 0) throw UsageError("walsh_char_sum: k must be nonnegative");
  }
  const PointSet pts = poly_lattice_points(rule);
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(b));
  for (int e = 0; e < b; ++e) roots[e] = std::polar(1.0, 2.0 * std::numbers::pi * e / b);
  std::complex<double> total = 0.0;
  for (const auto& row : pts.numerators) {
    int exponent = 0;
    for (int j = 0; j < s; ++j) {
      std::int64_t kj = k[j];
      for (int i = 0; i < m && kj > 0; ++i, kj /= b) {
        const int xi = static_cast<int>(row[j] / detail::ipow(b, m - 1 - i) % b);  // xi_{i+1}
        exponent += static_cast<int>(kj % b) * xi;
      }
    }
    total += roots[exponent % b];
  }
  return total / static_cast<double>(pts.size());
}

}  // namespace qmcforge
