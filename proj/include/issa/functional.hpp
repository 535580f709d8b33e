#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "issa/trajectory.hpp"

namespace issa {

/// Path functional with one or more real outputs.
///   species_at   X_s(t) for every listed species s and time t (time-major order)
///   extinction   1{tau < before}, tau = first time species s reaches zero
class Functional {
 public:
  enum class Kind { kSpeciesAt, kExtinction };

  static Functional species_at(std::vector<std::size_t> species, std::vector<double> times);
  static Functional species_at(std::size_t species, double time) {
    return species_at(std::vector<std::size_t>{species}, std::vector<double>{time});
  }
  static Functional extinction(std::size_t species, double before);

  Kind kind() const { return kind_; }
  const std::vector<std::size_t>& species() const { return species_; }
  const std::vector<double>& times() const { return times_; }
  std::size_t output_count() const;
  /// Human-readable name of output i, e.g. "P(20)" or "P(tau_I<10)".
  std::string label(std::size_t i, const std::vector<std::string>& species_names) const;
  /// Latest time the functional looks at.
  double horizon() const;

  /// Evaluates on a stored path.
  std::vector<double> evaluate(const TrajectoryPath& path) const;

 private:
  Kind kind_ = Kind::kSpeciesAt;
  std::vector<std::size_t> species_;
  std::vector<double> times_;
};

/// Evaluates a Functional while the path is generated. For extinction
/// functionals it reports finished() once the outcome is decided, allowing
/// simulators to stop early.
class FunctionalObserver final : public PathObserver {
 public:
  /// Keeps a reference to `f`, which must outlive the observer.
  FunctionalObserver(const Functional& f, std::size_t species_count);
  FunctionalObserver(Functional&&, std::size_t) = delete;

  void on_start(double t, StateView x) override;
  void on_jump(double t, std::uint32_t channel, StateView x) override;
  void on_end(double t, StateView x) override;
  bool finished() const override;

  /// Outputs; valid after on_end.
  const std::vector<double>& values() const { return values_; }

 private:
  void record_grid_until(double t);

  const Functional* f_;
  std::size_t d_;
  State current_;
  std::size_t next_ = 0;
  bool hit_ = false;
  std::vector<double> values_;
};

}  // namespace issa
