#pragma once

#include <stdexcept>
#include <string>

namespace patchcert {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two grids (samples or regions) of different frame size were combined.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a domain invariant (pixel outside the alphabet, bad label, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. The message names the file and, when known, the line.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Patch/mask/ablation parameters that cannot produce a valid geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured variant budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, unsigned long long required, unsigned long long budget)
      : Error(what), required_(required), budget_(budget) {}

  unsigned long long required() const noexcept { return required_; }
  unsigned long long budget() const noexcept { return budget_; }

 private:
  unsigned long long required_;
  unsigned long long budget_;
};

}  // namespace patchcert
