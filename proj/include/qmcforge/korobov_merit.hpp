#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "qmcforge/bernoulli.hpp"
#include "qmcforge/lattice.hpp"
#include "qmcforge/merit_report.hpp"
#include "qmcforge/subset_sums.hpp"
#include "qmcforge/weights.hpp"
#include "qmcforge/zeta.hpp"

namespace qmcforge {

/// omega(r/N) = scale_alpha * B_{2 alpha}(r/N) for r = 0..N-1.
inline std::vector<double> korobov_kernel_table(std::int64_t n, int alpha) {
  const double scale = korobov_kernel_scale(alpha);
  std::vector<double> table(static_cast<std::size_t>(n));
  for (std::int64_t r = 0; r < n; ++r) {
    table[r] = scale * bernoulli_even(alpha, static_cast<double>(r) / static_cast<double>(n));
  }
  return table;
}

namespace detail {

inline int integer_alpha(double alpha) {
  if (!has_closed_form(alpha)) {
    throw UnsupportedError("closed-form Korobov merit needs alpha in {1,2,3,4}; use the truncated series");
  }
  return static_cast<int>(alpha);
}

}  // namespace detail

/// Squared worst-case error P_{alpha,gamma,N}(z) in the weighted Korobov space
/// via the Bernoulli-polynomial form. `enumerate_subsets` forces the generic
/// 2^s subset enumeration instead of the weight-kind specific collapse.
inline MeritReport p_merit_closed(const LatticeRule& rule, const SpaceParams& params, bool per_subset = false,
                                  bool enumerate_subsets = false) {
  const int alpha = detail::integer_alpha(params.alpha);
  return detail::closed_form_merit(lattice_points(rule), params.weights, korobov_kernel_table(rule.modulus(), alpha),
                                   per_subset, enumerate_subsets);
}

namespace detail {

/// Sum of |k|^{-2 alpha} over 1 <= |k| <= K grouped by k mod N.
struct ResidueSums {
  std::int64_t modulus = 0;
  double alpha = 0.0;
  std::int64_t radius = 0;
  std::vector<double> by_residue;
  double one_sided = 0.0;  // sum_{k=1}^{K} k^{-2 alpha}
};

inline constexpr std::int64_t kMaxSeriesRadius = std::int64_t{1} << 26;

inline ResidueSums residue_sums(std::int64_t n, double alpha, std::int64_t radius) {
  if (radius < n) throw UsageError("truncation radius K must be at least N");
  if (radius > kMaxSeriesRadius) throw ResourceError("truncation radius K exceeds 2^26");
  ResidueSums rs{n, alpha, radius, std::vector<double>(static_cast<std::size_t>(n), 0.0), 0.0};
  // largest k first so small terms accumulate before large ones
  for (std::int64_t k = radius; k >= 1; --k) {
    const double t = std::pow(static_cast<double>(k), -2.0 * alpha);
    rs.by_residue[k % n] += t;
    rs.by_residue[(n - k % n) % n] += t;
    rs.one_sided += t;
  }
  return rs;
}

// sum over k_u in ([-K,K] \ {0})^{|u|} with (k_u, 0) . z = 0 mod N of prod |k_j|^{-2 alpha}.
// Dual membership depends only on the residues of the k_j, so the sum runs over
// residue tuples weighted by the per-residue sums; the last residue is solved for.
inline double dual_subset_sum(const LatticeRule& rule, CoordSet u, const ResidueSums& rs) {
  const std::int64_t n = rule.modulus();
  const auto coords = u.coords();
  const int d = static_cast<int>(coords.size());
  double work = 1.0;
  for (int i = 0; i + 1 < d; ++i) work *= static_cast<double>(n);
  if (work > 2e8) throw ResourceError("series enumeration too large (N^{|u|-1} > 2e8)");

  const std::int64_t z_last = rule.generator()[coords.back() - 1];
  std::vector<double> last_sum(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t r = 0; r < n; ++r) last_sum[(r * z_last) % n] += rs.by_residue[r];

  double total = 0.0;
  auto recurse = [&](auto&& self, int i, std::int64_t residue, double prod) -> void {
    if (i == d - 1) {
      total += prod * last_sum[(n - residue) % n];
      return;
    }
    const std::int64_t zi = rule.generator()[coords[i] - 1];
    for (std::int64_t r = 0; r < n; ++r) {
      const double w = rs.by_residue[r];
      if (w == 0.0) continue;
      self(self, i + 1, (residue + r * zi) % n, prod * w);
    }
  };
  recurse(recurse, 0, 0, 1.0);
  return total;
}

inline constexpr int kSeriesMaxDim = 4;

inline MeritReport series_merit(const LatticeRule& rule, const WeightSet& w, const ResidueSums& rs, bool per_subset) {
  const int s = rule.dimension();
  if (s > kSeriesMaxDim) throw ResourceError("truncated series supports s <= 4");
  w.require_dimension(s);
  const double full = 1.0 + 2.0 * riemann_zeta(2.0 * rs.alpha);
  const double partial = 1.0 + 2.0 * rs.one_sided;
  MeritReport report;
  report.method = MeritMethod::TruncatedSeries;
  double total = 0.0;
  double tail = 0.0;
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const double g = w.weight(u);
    const double inner = dual_subset_sum(rule, u, rs);
    total += g * inner;
    tail += g * std::max(0.0, std::pow(full, u.size()) - std::pow(partial, u.size()));
    if (per_subset) report.per_subset.push_back({u, inner, std::nullopt, std::nullopt});
  });
  report.p_value = total;
  report.truncation_bound = tail;
  return report;
}

}  // namespace detail

/// P_{alpha,gamma,N}(z) by summing r_alpha over all dual vectors with
/// 0 < |k_j| <= K. Works for any alpha > 1/2. The reported truncation_bound
/// majorizes the omitted part of the series.
inline MeritReport p_merit_series(const LatticeRule& rule, const SpaceParams& params, std::int64_t radius,
                                  bool per_subset = false) {
  if (rule.dimension() > detail::kSeriesMaxDim) throw ResourceError("truncated series supports s <= 4");
  return detail::series_merit(rule, params.weights, detail::residue_sums(rule.modulus(), params.alpha, radius),
                              per_subset);
}

/// P by the closed form when alpha is an integer in {1..4}, else by the
/// truncated series with `radius` (the series value plus its tail bound is
/// returned in `upper`).
struct MeritEstimate {
  double value;
  double upper;
  MeritReport report;
};

inline MeritEstimate p_merit_best(const LatticeRule& rule, const SpaceParams& params,
                                  std::int64_t radius = std::int64_t{1} << 16) {
  if (has_closed_form(params.alpha)) {
    auto r = p_merit_closed(rule, params);
    return {*r.p_value, *r.p_value, std::move(r)};
  }
  auto r = p_merit_series(rule, params, std::max(radius, rule.modulus()));
  return {*r.p_value, *r.p_value + *r.truncation_bound, std::move(r)};
}

namespace detail {

inline constexpr std::int64_t kRhoMaxModulus = 1024;

// Minimal |k| >= 1 with k * z = target (mod n), or -1 if the congruence has no solution.
inline std::int64_t min_nonzero_solution(std::int64_t z, std::int64_t target, std::int64_t n) {
  const std::int64_t g = std::gcd(z, n);
  if (target % g != 0) return -1;
  const std::int64_t m = n / g;
  if (m == 1) return 1;
  // solve (z/g) k = target/g mod m
  std::int64_t a = (z / g) % m, inv = 1;
  {
    std::int64_t r0 = m, r1 = a, t0 = 0, t1 = 1;
    while (r1 != 0) {
      const std::int64_t q = r0 / r1;
      std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
      std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    inv = ((t0 % m) + m) % m;
  }
  const std::int64_t c = (target / g % m) * inv % m;
  return c == 0 ? m : std::min(c, m - c);
}

// phi_u(z) = min prod |k_j| over duals with every k_j != 0 (allow_zero = false), or
// phi_{u,0}(z) = min prod max(1,|k_j|) over nonzero duals (allow_zero = true).
// Components are searched over |k| <= N/2 plus |k| = N, which holds a
// representative of minimal size for every residue class.
inline std::int64_t minimal_dual_size(const LatticeRule& rule, CoordSet u, bool allow_zero) {
  const std::int64_t n = rule.modulus();
  const auto coords = u.coords();
  const int d = static_cast<int>(coords.size());
  std::vector<std::int64_t> magnitudes;
  for (std::int64_t k = 1; 2 * k <= n; ++k) magnitudes.push_back(k);
  magnitudes.push_back(n);

  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  auto recurse = [&](auto&& self, int i, std::int64_t residue, std::int64_t prod, bool any_nonzero) -> void {
    const std::int64_t zi = rule.generator()[coords[i] - 1];
    const std::int64_t target = (n - residue) % n;
    if (i == d - 1) {
      if (allow_zero && target == 0 && any_nonzero) {
        best = std::min(best, prod);
        return;
      }
      const std::int64_t k = min_nonzero_solution(zi, target, n);
      if (k > 0) best = std::min(best, prod * k);
      return;
    }
    if (allow_zero) self(self, i + 1, residue, prod, any_nonzero);
    for (std::int64_t mag : magnitudes) {
      if (prod * mag >= best) break;
      // the first coordinate takes positive sign only when zeros are not allowed
      // (k -> -k symmetry); with zeros we keep both signs for simplicity
      for (int sign : {1, -1}) {
        if (sign < 0 && !allow_zero && i == 0) continue;
        const std::int64_t k = sign * mag;
        const std::int64_t r = ((residue + k % n * zi) % n + n) % n;
        self(self, i + 1, r, prod * mag, true);
      }
    }
  };
  recurse(recurse, 0, 0, 1, false);
  return best;
}

}  // namespace detail

/// Zaremba index rho_{alpha,gamma,N}(z) = max_u gamma_u / phi_u(z)^{2 alpha},
/// with phi_u and phi_{u,0} reported per subset.
inline MeritReport zaremba_rho(const LatticeRule& rule, const SpaceParams& params) {
  const int s = rule.dimension();
  if (s > 4) throw ResourceError("zaremba_rho supports s <= 4");
  if (rule.modulus() > detail::kRhoMaxModulus) throw ResourceError("zaremba_rho supports N <= 1024");
  params.weights.require_dimension(s);

  std::map<std::uint64_t, std::int64_t> phi;
  MeritReport report;
  double rho = 0.0;
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const std::int64_t ph = detail::minimal_dual_size(rule, u, false);
    phi[u.mask()] = ph;
    const double g = params.weights.weight(u);
    rho = std::max(rho, g / std::pow(static_cast<double>(ph), 2.0 * params.alpha));
  });
  for_each_nonempty_subset(s, [&](CoordSet u) {
    const std::int64_t ph0 = detail::minimal_dual_size(rule, u, true);
    std::int64_t from_parts = std::numeric_limits<std::int64_t>::max();
    for (std::uint64_t v = u.mask(); v; v = (v - 1) & u.mask()) from_parts = std::min(from_parts, phi[v]);
    if (ph0 != from_parts) {
      throw std::logic_error("zaremba_rho: phi_{u,0} differs from min over subsets of phi_v");
    }
    if (u.size() >= 2 && 2 * ph0 > rule.modulus()) {
      throw std::logic_error("zaremba_rho: phi_{u,0} exceeds N/2");
    }
    report.per_subset.push_back({u, std::nullopt, phi[u.mask()], ph0});
  });
  report.rho_value = rho;
  return report;
}

}  // namespace qmcforge
