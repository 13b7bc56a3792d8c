#pragma once

#include <stdexcept>
#include <string>

namespace udn {

/// Argument outside the mathematical domain of an operation (r <= 0, k < 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configuration or model that violates its invariants.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The exact coverage method cannot be used for this configuration: the UE
/// count distribution needs more terms than the configured hard cap. Callers
/// should switch to the upper-bound method.
class InfeasibleRegimeError : public std::runtime_error {
 public:
  InfeasibleRegimeError(const std::string& what, int required_terms)
      : std::runtime_error(what), required_terms_(required_terms) {}

  int required_terms() const noexcept { return required_terms_; }

 private:
  int required_terms_;
};

/// The alternating binomial sum of the exact method lost too many digits to
/// cancellation to be trusted.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, double amplification)
      : std::runtime_error(what), amplification_(amplification) {}

  double amplification() const noexcept { return amplification_; }

 private:
  double amplification_;
};

}  // namespace udn
