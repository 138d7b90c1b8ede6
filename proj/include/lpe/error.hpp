#pragma once

#include <stdexcept>
#include <string>

namespace lpe {

/// Invalid or inconsistent configuration (grid mismatch, out-of-range threshold, bad schema).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (p < 1, rho <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input data (nonmonotone time grid, too few samples, bad snapshot file).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested time step exceeds the CFL bound.
class CflViolation : public std::runtime_error {
 public:
  CflViolation(const std::string& what, double required_dt)
      : std::runtime_error(what), required_dt_(required_dt) {}
  double required_dt() const noexcept { return required_dt_; }

 private:
  double required_dt_;
};

/// Solution left the small-data regime (||n||_inf >= 1).
class RegimeViolation : public std::runtime_error {
 public:
  RegimeViolation(const std::string& what, double time, double n_sup)
      : std::runtime_error(what), time_(time), n_sup_(n_sup) {}
  double time() const noexcept { return time_; }
  double n_sup() const noexcept { return n_sup_; }

 private:
  double time_;
  double n_sup_;
};

}  // namespace lpe
