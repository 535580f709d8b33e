#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace issa {

/// Raised when a network or propensity definition is inconsistent, or when a
/// propensity evaluates to a negative or non-finite rate.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a simulation cannot proceed. Carries the time interval being
/// processed when the failure happened.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, double t0, double t1)
      : std::runtime_error(what), t0_(t0), t1_(t1) {}

  double interval_begin() const { return t0_; }
  double interval_end() const { return t1_; }

 private:
  double t0_;
  double t1_;
};

/// A propensity exceeded the certified upper bound used for thinning. The
/// generated path would not have the correct law, so this is always fatal.
class BoundViolation : public SimulationError {
 public:
  BoundViolation(std::size_t channel, double time, double value, double bound);

  std::size_t channel() const { return channel_; }
  double time() const { return time_; }
  double value() const { return value_; }
  double bound() const { return bound_; }

 private:
  std::size_t channel_;
  double time_;
  double value_;
  double bound_;
};

/// Invalid experiment or model configuration. `field` is a dotted path into
/// the configuration document (for example `model.channels[2].rate`).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace issa
