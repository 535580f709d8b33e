#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "issa/environment.hpp"

namespace issa {

using Count = std::int64_t;
using State = std::vector<Count>;
using StateView = std::span<const Count>;

/// A dominating rate valid on [t0, escape_time]. When the bound is global on
/// the requested window, escape_time equals the window end.
struct BoundCertificate {
  double bound = 0.0;
  double escape_time = 0.0;
};

/// Time-dependent multiplier of a propensity, drawn from a fixed grammar:
///   constant      c
///   sine          offset + amplitude * sin(2*pi*(t - phase) / period)
///   pulse         k * exp(-s * cos(pi*t - phase)^2)
///   modulated     scale * env(t), env a pre-generated environment path
/// Each form has a closed-form supremum used for bound certificates.
class RateFunction {
 public:
  enum class Kind : std::uint8_t { kConstant, kSine, kPulse, kModulated };

  RateFunction() = default;

  static RateFunction constant(double c);
  static RateFunction sine(double offset, double amplitude, double period,
                           double phase);
  static RateFunction pulse(double k, double s, double phase);
  /// `level_max` bounds every value the environment can take; it is used as
  /// the certificate rather than the realized path maximum.
  static RateFunction modulated(std::shared_ptr<const EnvironmentPath> env,
                                double scale, double level_max);

  double operator()(double t) const {
    switch (kind_) {
      case Kind::kConstant:
        return a_;
      case Kind::kSine:
        return a_ + b_ * std::sin(omega_ * (t - phase_));
      case Kind::kPulse: {
        const double c = std::cos(std::numbers::pi * t - phase_);
        return a_ * std::exp(-b_ * c * c);
      }
      case Kind::kModulated:
        return a_ * env_->value_at(t);
    }
    return 0.0;
  }

  /// Closed-form upper bound valid on any window: c, offset + |amplitude|,
  /// k, scale * level_max.
  double sup(double t0, double t1) const;
  /// Tighter bound on [t0, t1] for sine and pulse rates: the peak value if
  /// the window contains a peak, else the larger endpoint value (plus a
  /// 1e-12 relative margin for rounding). Equals sup() for other kinds.
  double local_sup(double t0, double t1) const;
  /// Period of a sine or pulse rate; infinity otherwise.
  double period() const;

  Kind kind() const { return kind_; }
  bool time_varying() const { return kind_ != Kind::kConstant; }

 private:
  Kind kind_ = Kind::kConstant;
  double a_ = 0.0;
  double b_ = 0.0;
  double omega_ = 0.0;
  double phase_ = 0.0;
  double level_max_ = 0.0;
  std::shared_ptr<const EnvironmentPath> env_;
};

struct Reactant {
  std::size_t species = 0;
  int multiplicity = 1;
};

/// State-dependent factor of a propensity.
///   mass_action  prod_i C(x_i, m_i)  (number of distinct reactant combinations)
///   population   sum of the listed species
///   frequency    x_a * x_b / sum(population), zero when the population is empty
class Kinetics {
 public:
  enum class Kind : std::uint8_t { kMassAction, kPopulation, kFrequency };

  Kinetics() = default;

  static Kinetics mass_action(std::vector<Reactant> reactants);
  static Kinetics population(std::vector<std::size_t> species);
  static Kinetics frequency(std::size_t a, std::size_t b,
                            std::vector<std::size_t> population);

  double factor(StateView x) const;

  Kind kind() const { return kind_; }
  const std::vector<Reactant>& reactants() const { return reactants_; }
  const std::vector<std::size_t>& population_species() const { return population_; }
  /// Largest species index referenced, or -1 when none.
  std::ptrdiff_t max_species() const;

 private:
  Kind kind_ = Kind::kMassAction;
  std::vector<Reactant> reactants_;
  std::vector<std::size_t> population_;
};

/// Evaluatable rate lambda_k(t, x) together with its bound provider.
///
/// The common case is separable: rate(t) * kinetics(x), certified by
/// rate.sup(t0, t1) * kinetics(x) globally on the window. Arbitrary user
/// propensities can be supplied through `custom`, in which case the bound
/// function is responsible for the certificate (including any escape time).
class Propensity {
 public:
  using EvaluateFn = std::function<double(double, StateView)>;
  using BoundFn = std::function<BoundCertificate(double, double, StateView)>;

  Propensity() = default;
  Propensity(RateFunction rate, Kinetics kinetics);

  static Propensity custom(EvaluateFn evaluate, BoundFn bound);

  double evaluate(double t, StateView x) const;
  BoundCertificate bound(double t0, double t1, StateView x) const;

  bool separable() const { return custom_ == nullptr; }
  const RateFunction& rate() const { return rate_; }
  const Kinetics& kinetics() const { return kinetics_; }

 private:
  struct Custom {
    EvaluateFn evaluate;
    BoundFn bound;
  };

  RateFunction rate_;
  Kinetics kinetics_;
  std::shared_ptr<const Custom> custom_;
};

struct ReactionChannel {
  std::string name;
  std::vector<Count> change;
  Propensity propensity;
};

/// Species and reaction channels. Immutable after construction; safe to share
/// read-only between concurrent samplers.
class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<std::string> species,
                  std::vector<ReactionChannel> channels);

  std::size_t species_count() const { return species_.size(); }
  std::size_t channel_count() const { return channels_.size(); }
  const std::vector<std::string>& species() const { return species_; }
  const std::vector<ReactionChannel>& channels() const { return channels_; }
  const ReactionChannel& channel(std::size_t k) const { return channels_[k]; }

  /// Network restricted to the given channel indices (species unchanged).
  ReactionNetwork subnetwork(std::span<const std::size_t> channels) const;

  /// Throws ModelError unless x has one non-negative count per species.
  void check_state(StateView x) const;

 private:
  std::vector<std::string> species_;
  std::vector<ReactionChannel> channels_;
};

enum class BoundMode { kPerChannel, kTotal };

/// lambda_0(t, x): exact sum of the channel propensities (no phantom channel).
double total_propensity(const ReactionNetwork& net, double t, StateView x);

/// rate(t) * prod_i C(x_i, m_i).
double mass_action_propensity(const RateFunction& rate,
                              std::span<const Reactant> reactants, StateView x,
                              double t);

/// Per-channel mode returns one certificate per channel; total mode returns a
/// single certificate for lambda_0. The common escape time is the minimum of
/// the per-channel escape times.
std::vector<BoundCertificate> certify_bound(const ReactionNetwork& net,
                                            double t0, double t1, StateView x,
                                            BoundMode mode);

/// x += change. Throws ModelError, leaving x unchanged, on a size mismatch or
/// if a count would become negative or overflow.
void apply_change(std::span<Count> x, std::span<const Count> change);

}  // namespace issa
