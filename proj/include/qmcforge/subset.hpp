#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "qmcforge/errors.hpp"

namespace qmcforge {

/// A set of coordinates {1, ..., 64}, stored as a bitmask (coordinate j is bit j-1).
class CoordSet {
 public:
  constexpr CoordSet() = default;
  constexpr explicit CoordSet(std::uint64_t mask) : mask_(mask) {}

  /// Builds a set from 1-based coordinate indices.
  static CoordSet of(const std::vector<int>& coords) {
    std::uint64_t m = 0;
    for (int j : coords) {
      if (j < 1 || j > 64) throw UsageError("coordinate index out of range: " + std::to_string(j));
      m |= std::uint64_t{1} << (j - 1);
    }
    return CoordSet(m);
  }

  /// {1, ..., s}
  static constexpr CoordSet first(int s) {
    return CoordSet(s >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << s) - 1));
  }

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool contains(int j) const { return (mask_ >> (j - 1)) & 1u; }
  /// Largest coordinate in the set, 0 when empty.
  constexpr int max_coord() const { return 64 - std::countl_zero(mask_); }
  constexpr CoordSet without(int j) const { return CoordSet(mask_ & ~(std::uint64_t{1} << (j - 1))); }
  constexpr CoordSet with(int j) const { return CoordSet(mask_ | (std::uint64_t{1} << (j - 1))); }
  constexpr bool subset_of(CoordSet other) const { return (mask_ & ~other.mask_) == 0; }

  /// 1-based coordinates in increasing order.
  std::vector<int> coords() const {
    std::vector<int> out;
    out.reserve(size());
    for (std::uint64_t m = mask_; m; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
    return out;
  }

  friend constexpr bool operator==(CoordSet, CoordSet) = default;
  friend constexpr auto operator<=>(CoordSet a, CoordSet b) { return a.mask_ <=> b.mask_; }

 private:
  std::uint64_t mask_ = 0;
};

/// Calls fn(u) for every nonempty u subset of {1..s}, in increasing mask order.
template <class Fn>
void for_each_nonempty_subset(int s, Fn&& fn) {
  if (s > 30) throw ResourceError("subset enumeration over more than 30 coordinates");
  const std::uint64_t end = std::uint64_t{1} << s;
  for (std::uint64_t m = 1; m < end; ++m) fn(CoordSet(m));
}

}  // namespace qmcforge
