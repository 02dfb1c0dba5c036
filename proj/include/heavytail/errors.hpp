#pragma once

#include <stdexcept>
#include <string>

namespace heavytail {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An estimator could not produce a value from otherwise valid input
/// (degenerate regression, empty trace, ...).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void domain_fail(const std::string& where, const std::string& what) {
  throw DomainError(where + ": " + what);
}

inline void require_domain(bool ok, const char* where, const char* what) {
  if (!ok) domain_fail(where, what);
}

}  // namespace detail
}  // namespace heavytail
