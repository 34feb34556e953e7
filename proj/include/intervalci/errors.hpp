#pragma once

#include <stdexcept>
#include <string>

namespace intervalci {

/// Invalid input: a value violates a documented domain invariant.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: a solver or engine could not produce a valid result.
/// Carries a diagnostics string describing the inputs and the failure mode.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace intervalci
