#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qmcforge/merit_report.hpp"
#include "qmcforge/weights.hpp"

namespace qmcforge {

/// sum over nonempty u in {1..s} of gamma_u prod_{j in u} v[j-1], with s = v.size().
/// Uses the structure of the weight kind (product collapse, elementary
/// symmetric sums for POD / order-dependent, sparse map for explicit).
inline double weighted_subset_product(const WeightSet& w, std::span<const double> v) {
  const int s = static_cast<int>(v.size());
  switch (w.kind()) {
    case WeightKind::Product: {
      double prod = 1.0;
      for (int j = 0; j < s; ++j) prod *= 1.0 + w.gamma()[j] * v[j];
      return prod - 1.0;
    }
    case WeightKind::POD: {
      std::vector<double> x(s);
      for (int j = 0; j < s; ++j) x[j] = w.gamma()[j] * v[j];
      return detail::order_weighted_symmetric_sum(w.order(), x);
    }
    case WeightKind::OrderDependent:
      return detail::order_weighted_symmetric_sum(w.order(), std::vector<double>(v.begin(), v.end()));
    case WeightKind::Explicit: {
      double total = 0.0;
      for (const auto& [u, g] : w.explicit_values()) {
        if (u.max_coord() > s) continue;
        double p = g;
        for (std::uint64_t m = u.mask(); m; m &= m - 1) p *= v[std::countr_zero(m)];
        total += p;
      }
      return total;
    }
  }
  return 0.0;
}

/// Same sum by enumerating every subset against a precomputed weight table
/// (see weight_table); O(2^s).
inline double weighted_subset_product_enumerated(std::span<const double> table, std::span<const double> v) {
  std::vector<double> prod(table.size(), 1.0);
  double total = 0.0;
  for (std::uint64_t m = 1; m < table.size(); ++m) {
    const std::uint64_t low = m & -m;
    prod[m] = prod[m & ~low] * v[std::countr_zero(low)];
    total += table[m] * prod[m];
  }
  return total;
}

namespace detail {

inline constexpr int kPerSubsetMaxDim = 12;

// Evaluates (1/|P|) sum_{x in P} sum_u gamma_u prod_{j in u} f(x_j), where
// f(x) = value_by_numerator[numerator of x]. Shared by the Korobov (Bernoulli)
// and Walsh (phi_alpha) closed forms.
inline MeritReport closed_form_merit(const PointSet& pts, const WeightSet& w,
                                     const std::vector<double>& value_by_numerator, bool per_subset,
                                     bool enumerate_subsets = false) {
  const int s = pts.dimension;
  w.require_dimension(s);
  if (w.kind() == WeightKind::Explicit && s > WeightSet::kExplicitMaxDim) {
    throw ResourceError("explicit weights support at most 20 dimensions");
  }
  std::vector<double> table;
  if (enumerate_subsets) table = weight_table(w, s);

  std::vector<double> v(s);
  double total = 0.0;
  std::vector<double> inner;
  if (per_subset) {
    if (s > kPerSubsetMaxDim) throw ResourceError("per-subset breakdown limited to 12 dimensions");
    inner.assign(std::size_t{1} << s, 0.0);
  }
  std::vector<double> prod;
  for (const auto& row : pts.numerators) {
    for (int j = 0; j < s; ++j) v[j] = value_by_numerator[static_cast<std::size_t>(row[j])];
    total += enumerate_subsets ? weighted_subset_product_enumerated(table, v) : weighted_subset_product(w, v);
    if (per_subset) {
      prod.assign(inner.size(), 1.0);
      for (std::uint64_t m = 1; m < inner.size(); ++m) {
        const std::uint64_t low = m & -m;
        prod[m] = prod[m & ~low] * v[std::countr_zero(low)];
        inner[m] += prod[m];
      }
    }
  }
  const double npts = static_cast<double>(pts.size());
  MeritReport report;
  report.p_value = total / npts;
  report.method = MeritMethod::ClosedForm;
  if (per_subset) {
    for (std::uint64_t m = 1; m < inner.size(); ++m) {
      report.per_subset.push_back({CoordSet(m), inner[m] / npts, std::nullopt, std::nullopt});
    }
  }
  return report;
}

}  // namespace detail
}  // namespace qmcforge
