#pragma once

#include <stdexcept>
#include <string>

namespace bfspec {

/// A computation would exceed a documented budget (factorisation range, point count).
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid system or experiment description.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical precondition of an operation does not hold.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bfspec
