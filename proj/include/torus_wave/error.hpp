#pragma once

#include <stdexcept>
#include <string>

namespace tw {

/// Invalid model or solver parameter (outside the admissible range).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the domain of an operation (non-finite samples, non-timelike potential, t <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The solution left the regime where (1+u)^mu is defined, or the state became non-finite.
class BreakdownError : public std::runtime_error {
 public:
  BreakdownError(const std::string& what, double t, double u_min)
      : std::runtime_error(what), t_(t), u_min_(u_min) {}

  double time() const noexcept { return t_; }
  double u_min() const noexcept { return u_min_; }

 private:
  double t_;
  double u_min_;
};

}  // namespace tw
