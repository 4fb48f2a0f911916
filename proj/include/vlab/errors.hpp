#pragma once

#include <stdexcept>
#include <string>

namespace vlab {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LatticeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RegularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sewing certificate failures, Picard non-contraction, iteration caps.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double measured)
      : std::runtime_error(what), measured_factor(measured) {}
  double measured_factor;
};

struct NotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vlab
