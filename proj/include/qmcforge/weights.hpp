#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qmcforge/errors.hpp"
#include "qmcforge/subset.hpp"
#include "qmcforge/zeta.hpp"

namespace qmcforge {

enum class WeightKind { Product, POD, OrderDependent, Explicit };

inline const char* to_string(WeightKind k) {
  switch (k) {
    case WeightKind::Product: return "product";
    case WeightKind::POD: return "pod";
    case WeightKind::OrderDependent: return "order";
    case WeightKind::Explicit: return "explicit";
  }
  return "?";
}

/// Nonnegative weights gamma_u for every nonempty coordinate subset u of {1..s_max}.
///
///   Product:         gamma_u = prod_{j in u} gamma_j
///   POD:             gamma_u = Gamma_{|u|} prod_{j in u} gamma_j
///   OrderDependent:  gamma_u = Gamma_{|u|}
///   Explicit:        gamma_u looked up in a finite map, 0 when absent
///
/// Sequences are stored 0-based: gamma()[j-1] is gamma_j, order()[k-1] is Gamma_k.
class WeightSet {
 public:
  static constexpr int kDefaultMaxDim = 64;
  static constexpr int kExplicitMaxDim = 20;

  static WeightSet product(std::vector<double> gamma) {
    WeightSet w(WeightKind::Product);
    w.gamma_ = std::move(gamma);
    w.s_max_ = static_cast<int>(w.gamma_.size());
    w.validate();
    return w;
  }

  static WeightSet pod(std::vector<double> order, std::vector<double> gamma) {
    WeightSet w(WeightKind::POD);
    w.order_ = std::move(order);
    w.gamma_ = std::move(gamma);
    w.s_max_ = static_cast<int>(std::min(w.order_.size(), w.gamma_.size()));
    w.validate();
    return w;
  }

  static WeightSet order_dependent(std::vector<double> order) {
    WeightSet w(WeightKind::OrderDependent);
    w.order_ = std::move(order);
    w.s_max_ = static_cast<int>(w.order_.size());
    w.validate();
    return w;
  }

  static WeightSet explicit_map(std::map<CoordSet, double> values, int s_max = kExplicitMaxDim) {
    WeightSet w(WeightKind::Explicit);
    w.explicit_ = std::move(values);
    w.s_max_ = s_max;
    for (const auto& [u, g] : w.explicit_) {
      if (u.empty()) throw UsageError("explicit weights: empty subset key");
      if (u.max_coord() > s_max) throw UsageError("explicit weights: subset exceeds s_max");
    }
    w.validate();
    return w;
  }

  /// gamma_u = value for every u (product weights gamma_j = value).
  static WeightSet constant(int s_max, double value = 1.0) {
    return product(std::vector<double>(static_cast<std::size_t>(s_max), value));
  }

  WeightKind kind() const { return kind_; }
  int s_max() const { return s_max_; }
  const std::vector<double>& gamma() const { return gamma_; }
  const std::vector<double>& order() const { return order_; }
  const std::map<CoordSet, double>& explicit_values() const { return explicit_; }

  double weight(CoordSet u) const {
    if (u.empty()) throw UsageError("weight: subset must be nonempty");
    if (u.max_coord() > s_max_) {
      throw UsageError("weight: subset reaches coordinate " + std::to_string(u.max_coord()) +
                       " beyond s_max = " + std::to_string(s_max_));
    }
    switch (kind_) {
      case WeightKind::Product: return coord_product(u);
      case WeightKind::POD: return order_[u.size() - 1] * coord_product(u);
      case WeightKind::OrderDependent: return order_[u.size() - 1];
      case WeightKind::Explicit: {
        auto it = explicit_.find(u);
        return it == explicit_.end() ? 0.0 : it->second;
      }
    }
    return 0.0;
  }

  double weight(const std::vector<int>& coords) const { return weight(CoordSet::of(coords)); }

  /// Weights with every gamma_u replaced by gamma_u^e (e > 0). The kind is kept.
  WeightSet pow(double e) const {
    WeightSet w = *this;
    auto raise = [e](std::vector<double>& v) {
      for (double& x : v) x = std::pow(x, e);
    };
    raise(w.gamma_);
    raise(w.order_);
    for (auto& [u, g] : w.explicit_) g = std::pow(g, e);
    return w;
  }

  /// Weights with every gamma_u multiplied by c >= 0. Product weights become POD.
  WeightSet scaled(double c) const {
    switch (kind_) {
      case WeightKind::Product:
        return pod(std::vector<double>(gamma_.size(), c), gamma_);
      case WeightKind::POD:
      case WeightKind::OrderDependent: {
        WeightSet w = *this;
        for (double& x : w.order_) x *= c;
        w.validate();
        return w;
      }
      case WeightKind::Explicit: {
        WeightSet w = *this;
        for (auto& [u, g] : w.explicit_) g *= c;
        w.validate();
        return w;
      }
    }
    return *this;
  }

  /// Copy restricted to the first s coordinates.
  WeightSet truncated(int s) const {
    require_dimension(s);
    WeightSet w = *this;
    w.s_max_ = s;
    if (kind_ == WeightKind::Product || kind_ == WeightKind::POD) w.gamma_.resize(s);
    if (kind_ == WeightKind::POD || kind_ == WeightKind::OrderDependent) w.order_.resize(s);
    if (kind_ == WeightKind::Explicit) std::erase_if(w.explicit_, [s](const auto& kv) { return kv.first.max_coord() > s; });
    return w;
  }

  void require_dimension(int s) const {
    if (s < 1 || s > s_max_) {
      throw UsageError("weights support dimensions 1.." + std::to_string(s_max_) + ", requested " +
                       std::to_string(s));
    }
  }

 private:
  explicit WeightSet(WeightKind k) : kind_(k) {}

  double coord_product(CoordSet u) const {
    double p = 1.0;
    for (std::uint64_t m = u.mask(); m; m &= m - 1) p *= gamma_[std::countr_zero(m)];
    return p;
  }

  void validate() const {
    auto check = [](double x) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw UsageError("weights must be finite and nonnegative");
    };
    for (double x : gamma_) check(x);
    for (double x : order_) check(x);
    for (const auto& [u, g] : explicit_) check(g);
    if (s_max_ < 1) throw UsageError("weights must cover at least one coordinate");
  }

  WeightKind kind_;
  int s_max_ = 0;
  std::vector<double> gamma_;
  std::vector<double> order_;
  std::map<CoordSet, double> explicit_;
};

/// Smoothness alpha > 1/2 together with a weight set.
struct SpaceParams {
  double alpha;
  WeightSet weights;

  SpaceParams(double a, WeightSet w) : alpha(a), weights(std::move(w)) {
    if (!(alpha > 0.5)) throw DomainError("smoothness alpha must exceed 1/2");
  }
};

/// gamma_u for every mask in [0, 2^s); entry 0 (the empty set) is 0.
inline std::vector<double> weight_table(const WeightSet& w, int s) {
  w.require_dimension(s);
  if (s > 24) throw ResourceError("weight table over more than 24 coordinates");
  std::vector<double> table(std::size_t{1} << s, 0.0);
  for_each_nonempty_subset(s, [&](CoordSet u) { table[u.mask()] = w.weight(u); });
  return table;
}

/// True iff gamma_v >= gamma_u whenever v is a nonempty proper subset of u,
/// for u within {1..s}. Checked through single-element removals, which
/// implies the full condition by transitivity.
inline bool check_monotone(const WeightSet& w, int s) {
  w.require_dimension(s);
  if (w.kind() == WeightKind::Product) {
    // gamma_{u\j} (1 - gamma_j) >= 0 for all u containing j with |u| >= 2
    const auto& g = w.gamma();
    for (int j = 0; j < s; ++j) {
      if (g[j] <= 1.0) continue;
      for (int i = 0; i < s; ++i) {
        if (i != j && g[i] > 0.0) return false;
      }
    }
    return true;
  }
  if (s > WeightSet::kExplicitMaxDim) throw ResourceError("check_monotone: s too large for enumeration");
  const auto table = weight_table(w, s);
  for (std::uint64_t m = 1; m < table.size(); ++m) {
    if (std::popcount(m) < 2) continue;
    for (std::uint64_t bits = m; bits; bits &= bits - 1) {
      const std::uint64_t smaller = m & ~(bits & -bits);
      if (table[smaller] < table[m]) return false;
    }
  }
  return true;
}

namespace detail {

inline double zeta_factor(double lambda, double alpha) {
  if (!(lambda <= 1.0)) throw UsageError("lambda must satisfy lambda <= 1");
  if (!(2.0 * alpha * lambda > 1.0)) {
    throw DomainError("2*alpha*lambda must exceed 1 (zeta diverges)");
  }
  return 2.0 * riemann_zeta(2.0 * alpha * lambda);
}

// sum_k coef[k-1] * e_k(x), with e_k the elementary symmetric polynomials.
inline double order_weighted_symmetric_sum(const std::vector<double>& coef, const std::vector<double>& x) {
  std::vector<double> e(x.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = i + 1; k >= 1; --k) e[k] += e[k - 1] * x[i];
  }
  double total = 0.0;
  for (std::size_t k = 1; k <= x.size(); ++k) total += coef[k - 1] * e[k];
  return total;
}

}  // namespace detail

/// sum over nonempty u in {1..s} of gamma_u^lambda (2 zeta(2 alpha lambda))^{|u|},
/// by explicit subset enumeration.
inline double weighted_zeta_sum_enumerated(const WeightSet& w, int s, double lambda, double alpha) {
  const double c = detail::zeta_factor(lambda, alpha);
  w.require_dimension(s);
  double total = 0.0;
  for_each_nonempty_subset(s, [&](CoordSet u) { total += std::pow(w.weight(u), lambda) * std::pow(c, u.size()); });
  return total;
}

/// sum over nonempty u in {1..s} of gamma_u^lambda (2 zeta(2 alpha lambda))^{|u|}.
/// Requires 1/(2 alpha) < lambda <= 1.
inline double weighted_zeta_sum(const WeightSet& w, int s, double lambda, double alpha) {
  const double c = detail::zeta_factor(lambda, alpha);
  w.require_dimension(s);
  switch (w.kind()) {
    case WeightKind::Product: {
      double prod = 1.0;
      for (int j = 0; j < s; ++j) prod *= 1.0 + std::pow(w.gamma()[j], lambda) * c;
      return prod - 1.0;
    }
    case WeightKind::POD: {
      std::vector<double> x(s), coef(s);
      for (int j = 0; j < s; ++j) {
        x[j] = std::pow(w.gamma()[j], lambda) * c;
        coef[j] = std::pow(w.order()[j], lambda);
      }
      return detail::order_weighted_symmetric_sum(coef, x);
    }
    case WeightKind::OrderDependent: {
      double total = 0.0;
      double binom = 1.0;
      for (int k = 1; k <= s; ++k) {
        binom = binom * (s - k + 1) / k;
        total += std::pow(w.order()[k - 1], lambda) * binom * std::pow(c, k);
      }
      return total;
    }
    case WeightKind::Explicit: {
      double total = 0.0;
      for (const auto& [u, g] : w.explicit_values()) {
        if (u.max_coord() <= s) total += std::pow(g, lambda) * std::pow(c, u.size());
      }
      return total;
    }
  }
  return 0.0;
}

}  // namespace qmcforge
