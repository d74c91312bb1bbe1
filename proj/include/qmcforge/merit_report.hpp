#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmcforge/subset.hpp"

namespace qmcforge {

enum class MeritMethod { ClosedForm, TruncatedSeries };

inline const char* to_string(MeritMethod m) {
  return m == MeritMethod::ClosedForm ? "closed-form" : "truncated-series";
}

/// Breakdown for one coordinate subset u. `inner` is the unweighted dual sum
/// for u; `phi` / `phi0` are the minimal dual sizes with / without requiring
/// every component of the dual vector to be nonzero.
struct SubsetMerit {
  CoordSet u;
  std::optional<double> inner;
  std::optional<std::int64_t> phi;
  std::optional<std::int64_t> phi0;
};

/// Squared worst-case error P and/or figure of merit rho for one rule and one
/// (alpha, gamma) pair.
struct MeritReport {
  std::optional<double> p_value;
  std::optional<double> rho_value;
  std::optional<MeritMethod> method;
  std::optional<double> truncation_bound;
  std::vector<SubsetMerit> per_subset;

  SubsetMerit* find(CoordSet u) {
    for (auto& e : per_subset) {
      if (e.u == u) return &e;
    }
    return nullptr;
  }
  const SubsetMerit* find(CoordSet u) const { return const_cast<MeritReport*>(this)->find(u); }
};

/// Combines a P report with a rho report for the same rule; per-subset entries are merged by u.
inline MeritReport merge(MeritReport p_report, const MeritReport& rho_report) {
  p_report.rho_value = rho_report.rho_value;
  for (const auto& e : rho_report.per_subset) {
    if (auto* mine = p_report.find(e.u)) {
      mine->phi = e.phi;
      mine->phi0 = e.phi0;
    } else {
      p_report.per_subset.push_back(e);
    }
  }
  return p_report;
}

}  // namespace qmcforge
