#pragma once

#include <stdexcept>
#include <string>

namespace qmcforge {

/// Caller violated an operation's contract (bad subset, bad flag, K < N, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain (zeta divergence, alpha <= 1/2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested smoothness or feature has no implementation on this path.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Enumeration would exceed the configured work cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class E>
[[noreturn]] inline void raise(const std::string& what) {
  throw E(what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

}  // namespace detail
}  // namespace qmcforge
