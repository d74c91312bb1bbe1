#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qmcforge/errors.hpp"

namespace qmcforge {

/// Point set with exact rational coordinates: coordinate j of point n is
/// numerators[n][j] / denominator.
struct PointSet {
  std::int64_t denominator = 1;
  int dimension = 0;
  std::vector<std::vector<std::int64_t>> numerators;

  std::size_t size() const { return numerators.size(); }
  double coord(std::size_t n, int j) const {
    return static_cast<double>(numerators[n][j]) / static_cast<double>(denominator);
  }
};

/// Rank-1 lattice rule: modulus N >= 2 and generating vector z in {1..N-1}^s.
class LatticeRule {
 public:
  LatticeRule(std::int64_t n, std::vector<std::int64_t> z) : n_(n), z_(std::move(z)) {
    if (n_ < 2) throw UsageError("lattice modulus N must be at least 2");
    if (z_.empty()) throw UsageError("lattice generating vector must have s >= 1");
    for (auto zj : z_) {
      if (zj < 1 || zj > n_ - 1) {
        throw UsageError("generating vector component " + std::to_string(zj) + " outside {1.." +
                         std::to_string(n_ - 1) + "}");
      }
    }
  }

  std::int64_t modulus() const { return n_; }
  int dimension() const { return static_cast<int>(z_.size()); }
  const std::vector<std::int64_t>& generator() const { return z_; }

  friend bool operator==(const LatticeRule&, const LatticeRule&) = default;

 private:
  std::int64_t n_;
  std::vector<std::int64_t> z_;
};

/// The N points ({n z_1 / N}, ..., {n z_s / N}), n = 0..N-1, as exact numerators over N.
inline PointSet lattice_points(const LatticeRule& rule) {
  const auto n_pts = rule.modulus();
  PointSet ps;
  ps.denominator = n_pts;
  ps.dimension = rule.dimension();
  ps.numerators.resize(static_cast<std::size_t>(n_pts));
  for (std::int64_t n = 0; n < n_pts; ++n) {
    auto& row = ps.numerators[n];
    row.reserve(rule.dimension());
    for (auto zj : rule.generator()) row.push_back((n * zj) % n_pts);
  }
  return ps;
}

/// Euler's totient by trial-division factorization.
inline std::int64_t euler_totient(std::int64_t n) {
  if (n < 1) throw UsageError("euler_totient: N must be positive");
  std::int64_t result = n;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

/// Smallest generator of the multiplicative group mod a prime N (brute-force order test).
inline std::int64_t primitive_root(std::int64_t prime) {
  if (!is_prime(prime)) throw UsageError("primitive_root: modulus must be prime");
  if (prime == 2) return 1;
  for (std::int64_t g = 2; g < prime; ++g) {
    std::int64_t x = 1;
    std::int64_t order = 0;
    do {
      x = x * g % prime;
      ++order;
    } while (x != 1);
    if (order == prime - 1) return g;
  }
  throw std::logic_error("primitive_root: no generator found");
}

}  // namespace qmcforge
