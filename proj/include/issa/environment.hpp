#pragma once

#include <cstddef>
#include <vector>

#include "issa/random.hpp"

namespace issa {

/// Finite-state continuous-time Markov environment (for example the level of a
/// modulated rate constant). Holding times are exponential with
/// `holding_rate`; jumps follow the embedded transition matrix.
struct EnvironmentModel {
  std::vector<double> levels;
  std::vector<std::vector<double>> transitions;
  std::size_t initial_index = 0;
  double holding_rate = 1.0;

  /// Throws ModelError unless rows sum to one with zero diagonal (a single
  /// level with no transitions is accepted as a constant environment).
  void validate() const;
  double max_level() const;
};

/// Right-continuous piecewise-constant realization of an environment on
/// [0, horizon]. `values.size() == switch_times.size() + 1`.
struct EnvironmentPath {
  std::vector<double> switch_times;
  std::vector<double> values;
  double horizon = 0.0;

  double value_at(double t) const;
};

/// Pre-generates the environment on [0, T].
EnvironmentPath simulate_environment(const EnvironmentModel& model, double T,
                                     RandomStream& stream);

}  // namespace issa
