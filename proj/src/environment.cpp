#include "issa/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "issa/errors.hpp"

namespace issa {

void EnvironmentModel::validate() const {
  if (levels.empty()) throw ModelError("environment needs at least one level");
  if (initial_index >= levels.size()) throw ModelError("environment initial index out of range");
  if (!(holding_rate > 0.0) || !std::isfinite(holding_rate)) {
    throw ModelError("environment holding rate must be > 0");
  }
  for (double v : levels) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ModelError("environment levels must be >= 0");
  }
  if (levels.size() == 1) {
    if (!transitions.empty() && !(transitions.size() == 1 && transitions[0].size() == 1 &&
                                  transitions[0][0] == 0.0)) {
      throw ModelError("single-level environment cannot have transitions");
    }
    return;
  }
  if (transitions.size() != levels.size()) {
    throw ModelError("transition matrix must be square with one row per level");
  }
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto& row = transitions[i];
    if (row.size() != levels.size()) {
      throw ModelError("transition row " + std::to_string(i) + " has the wrong length");
    }
    if (row[i] != 0.0) throw ModelError("transition matrix must have a zero diagonal");
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw ModelError("transition probabilities must be >= 0");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
      throw ModelError("transition row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

double EnvironmentModel::max_level() const {
  return *std::max_element(levels.begin(), levels.end());
}

double EnvironmentPath::value_at(double t) const {
  const auto it = std::upper_bound(switch_times.begin(), switch_times.end(), t);
  return values[static_cast<std::size_t>(it - switch_times.begin())];
}

EnvironmentPath simulate_environment(const EnvironmentModel& model, double T,
                                     RandomStream& stream) {
  model.validate();
  EnvironmentPath path;
  path.horizon = T;
  std::size_t current = model.initial_index;
  path.values.push_back(model.levels[current]);
  if (model.levels.size() == 1) return path;

  double t = 0.0;
  while (true) {
    t += stream.exponential() / model.holding_rate;
    if (t > T) break;
    const auto& row = model.transitions[current];
    const double u = stream.uniform();
    double cum = 0.0;
    std::size_t next = current;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] <= 0.0) continue;
      next = j;
      cum += row[j];
      if (u < cum) break;
    }
    current = next;
    path.switch_times.push_back(t);
    path.values.push_back(model.levels[current]);
  }
  return path;
}

}  // namespace issa
