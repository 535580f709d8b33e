#include "issa/network.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "issa/errors.hpp"

namespace issa {
namespace {

void require_rate(bool ok, const char* what) {
  if (!ok) throw ModelError(what);
}

}  // namespace

BoundViolation::BoundViolation(std::size_t channel, double time, double value,
                               double bound)
    : SimulationError(
          [&] {
            std::ostringstream os;
            os.precision(17);
            os << "propensity of channel " << channel + 1 << " is " << value
               << " at t=" << time << ", above its certified bound " << bound;
            return os.str();
          }(),
          time, time),
      channel_(channel),
      time_(time),
      value_(value),
      bound_(bound) {}

RateFunction RateFunction::constant(double c) {
  require_rate(std::isfinite(c) && c >= 0.0, "constant rate must be finite and >= 0");
  RateFunction r;
  r.kind_ = Kind::kConstant;
  r.a_ = c;
  return r;
}

RateFunction RateFunction::sine(double offset, double amplitude, double period,
                                double phase) {
  require_rate(std::isfinite(offset) && std::isfinite(amplitude) &&
                   std::isfinite(phase),
               "sine rate parameters must be finite");
  require_rate(period > 0.0 && std::isfinite(period), "sine period must be > 0");
  require_rate(offset >= std::fabs(amplitude),
               "sine rate offset must dominate |amplitude| so the rate stays >= 0");
  RateFunction r;
  r.kind_ = Kind::kSine;
  r.a_ = offset;
  r.b_ = amplitude;
  r.omega_ = 2.0 * std::numbers::pi / period;
  r.phase_ = phase;
  return r;
}

RateFunction RateFunction::pulse(double k, double s, double phase) {
  require_rate(std::isfinite(k) && k >= 0.0, "pulse scale must be finite and >= 0");
  require_rate(std::isfinite(s) && s >= 0.0, "pulse synchrony must be finite and >= 0");
  require_rate(std::isfinite(phase), "pulse phase must be finite");
  RateFunction r;
  r.kind_ = Kind::kPulse;
  r.a_ = k;
  r.b_ = s;
  r.phase_ = phase;
  return r;
}

RateFunction RateFunction::modulated(std::shared_ptr<const EnvironmentPath> env,
                                     double scale, double level_max) {
  require_rate(env != nullptr, "modulated rate needs an environment path");
  require_rate(std::isfinite(scale) && scale >= 0.0,
               "modulated scale must be finite and >= 0");
  require_rate(std::isfinite(level_max), "environment maximum must be finite");
  for (double v : env->values) {
    require_rate(v >= 0.0 && v <= level_max,
                 "environment values must lie in [0, level_max]");
  }
  RateFunction r;
  r.kind_ = Kind::kModulated;
  r.a_ = scale;
  r.level_max_ = level_max;
  r.env_ = std::move(env);
  return r;
}

double RateFunction::sup(double /*t0*/, double /*t1*/) const {
  switch (kind_) {
    case Kind::kConstant:
      return a_;
    case Kind::kSine:
      return a_ + std::fabs(b_);
    case Kind::kPulse:
      return a_;
    case Kind::kModulated:
      return a_ * level_max_;
  }
  return 0.0;
}

double RateFunction::local_sup(double t0, double t1) const {
  // Endpoint maxima get a small relative margin so that rounding in
  // operator() never lands above the certificate.
  constexpr double kMargin = 1e-12;
  switch (kind_) {
    case Kind::kConstant:
      return a_;
    case Kind::kSine: {
      const double global = a_ + std::fabs(b_);
      if (b_ == 0.0 || !(t1 - t0 < 2.0 * std::numbers::pi / omega_)) return global;
      // Peak angle of b sin(theta) modulo 2 pi.
      const double peak = b_ > 0.0 ? 0.5 * std::numbers::pi : -0.5 * std::numbers::pi;
      const double th0 = omega_ * (t0 - phase_);
      const double th1 = omega_ * (t1 - phase_);
      const double k = std::ceil((th0 - peak) / (2.0 * std::numbers::pi));
      if (peak + 2.0 * std::numbers::pi * k <= th1) return global;
      const double end = std::max((*this)(t0), (*this)(t1));
      return std::min(global, end + kMargin * global);
    }
    case Kind::kPulse: {
      if (b_ == 0.0 || !(t1 - t0 < 1.0)) return a_;
      // Peaks where cos(pi t - phase) = 0, i.e. t = 1/2 + phase/pi + j.
      const double first = 0.5 + phase_ / std::numbers::pi;
      const double j = std::ceil(t0 - first);
      if (first + j <= t1) return a_;
      const double end = std::max((*this)(t0), (*this)(t1));
      return std::min(a_, end + kMargin * a_);
    }
    case Kind::kModulated:
      return a_ * level_max_;
  }
  return 0.0;
}

double RateFunction::period() const {
  switch (kind_) {
    case Kind::kSine:
      return 2.0 * std::numbers::pi / omega_;
    case Kind::kPulse:
      return 1.0;
    default:
      return std::numeric_limits<double>::infinity();
  }
}

Kinetics Kinetics::mass_action(std::vector<Reactant> reactants) {
  for (const Reactant& r : reactants) {
    if (r.multiplicity < 1) throw ModelError("reactant multiplicity must be >= 1");
  }
  Kinetics k;
  k.kind_ = Kind::kMassAction;
  k.reactants_ = std::move(reactants);
  return k;
}

Kinetics Kinetics::population(std::vector<std::size_t> species) {
  Kinetics k;
  k.kind_ = Kind::kPopulation;
  k.population_ = std::move(species);
  return k;
}

Kinetics Kinetics::frequency(std::size_t a, std::size_t b,
                             std::vector<std::size_t> population) {
  if (population.empty()) throw ModelError("frequency kinetics needs a population");
  Kinetics k;
  k.kind_ = Kind::kFrequency;
  k.reactants_ = {{a, 1}, {b, 1}};
  k.population_ = std::move(population);
  return k;
}

std::ptrdiff_t Kinetics::max_species() const {
  std::ptrdiff_t m = -1;
  for (const Reactant& r : reactants_) m = std::max(m, static_cast<std::ptrdiff_t>(r.species));
  for (std::size_t s : population_) m = std::max(m, static_cast<std::ptrdiff_t>(s));
  return m;
}

double Kinetics::factor(StateView x) const {
  switch (kind_) {
    case Kind::kMassAction: {
      double f = 1.0;
      for (const Reactant& r : reactants_) {
        const Count n = x[r.species];
        if (n < r.multiplicity) return 0.0;
        for (int j = 0; j < r.multiplicity; ++j) {
          f *= static_cast<double>(n - j) / static_cast<double>(j + 1);
        }
      }
      return f;
    }
    case Kind::kPopulation: {
      Count total = 0;
      for (std::size_t s : population_) total += x[s];
      return static_cast<double>(total);
    }
    case Kind::kFrequency: {
      Count total = 0;
      for (std::size_t s : population_) total += x[s];
      if (total == 0) return 0.0;
      return static_cast<double>(x[reactants_[0].species]) *
             static_cast<double>(x[reactants_[1].species]) / static_cast<double>(total);
    }
  }
  return 0.0;
}

Propensity::Propensity(RateFunction rate, Kinetics kinetics)
    : rate_(std::move(rate)), kinetics_(std::move(kinetics)) {}

Propensity Propensity::custom(EvaluateFn evaluate, BoundFn bound) {
  if (!evaluate || !bound) throw ModelError("custom propensity needs evaluate and bound");
  Propensity p;
  p.custom_ = std::make_shared<const Custom>(Custom{std::move(evaluate), std::move(bound)});
  return p;
}

double Propensity::evaluate(double t, StateView x) const {
  if (custom_) {
    const double v = custom_->evaluate(t, x);
    if (!(v >= 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "propensity evaluated to " << v << " at t=" << t;
      throw ModelError(os.str());
    }
    return v;
  }
  return rate_(t) * kinetics_.factor(x);
}

BoundCertificate Propensity::bound(double t0, double t1, StateView x) const {
  if (custom_) {
    BoundCertificate c = custom_->bound(t0, t1, x);
    if (!(c.bound >= 0.0) || !(c.escape_time > t0) || c.escape_time > t1) {
      std::ostringstream os;
      os << "bound provider returned an invalid certificate (bound=" << c.bound
         << ", escape=" << c.escape_time << ") on [" << t0 << ", " << t1 << "]";
      throw ModelError(os.str());
    }
    return c;
  }
  return {rate_.sup(t0, t1) * kinetics_.factor(x), t1};
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species,
                                 std::vector<ReactionChannel> channels)
    : species_(std::move(species)), channels_(std::move(channels)) {
  if (species_.empty()) throw ModelError("network needs at least one species");
  if (channels_.empty()) throw ModelError("network needs at least one channel");
  const auto d = static_cast<std::ptrdiff_t>(species_.size());
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    const ReactionChannel& ch = channels_[k];
    if (ch.change.size() != species_.size()) {
      throw ModelError("channel " + std::to_string(k + 1) +
                       ": change vector dimension differs from species count");
    }
    if (ch.propensity.separable() && ch.propensity.kinetics().max_species() >= d) {
      throw ModelError("channel " + std::to_string(k + 1) +
                       ": kinetics reference an unknown species");
    }
  }
}

ReactionNetwork ReactionNetwork::subnetwork(std::span<const std::size_t> channels) const {
  std::vector<ReactionChannel> kept;
  kept.reserve(channels.size());
  for (std::size_t k : channels) {
    if (k >= channels_.size()) throw ModelError("subnetwork channel out of range");
    kept.push_back(channels_[k]);
  }
  return ReactionNetwork(species_, std::move(kept));
}

void ReactionNetwork::check_state(StateView x) const {
  if (x.size() != species_.size()) {
    throw ModelError("state has " + std::to_string(x.size()) + " entries, network has " +
                     std::to_string(species_.size()) + " species");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0) throw ModelError("state count of species " + species_[i] + " is negative");
  }
}

double total_propensity(const ReactionNetwork& net, double t, StateView x) {
  double sum = 0.0;
  for (std::size_t k = 0; k < net.channel_count(); ++k) {
    const double v = net.channel(k).propensity.evaluate(t, x);
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ModelError("channel " + std::to_string(k + 1) +
                       " propensity is negative or not finite");
    }
    sum += v;
  }
  return sum;
}

double mass_action_propensity(const RateFunction& rate,
                              std::span<const Reactant> reactants, StateView x,
                              double t) {
  return rate(t) *
         Kinetics::mass_action({reactants.begin(), reactants.end()}).factor(x);
}

std::vector<BoundCertificate> certify_bound(const ReactionNetwork& net,
                                            double t0, double t1, StateView x,
                                            BoundMode mode) {
  if (!(t0 < t1)) throw ModelError("certify_bound needs t0 < t1");
  std::vector<BoundCertificate> certs;
  certs.reserve(net.channel_count());
  double escape = t1;
  for (const ReactionChannel& ch : net.channels()) {
    certs.push_back(ch.propensity.bound(t0, t1, x));
    escape = std::min(escape, certs.back().escape_time);
  }
  if (mode == BoundMode::kTotal) {
    double total = 0.0;
    for (const BoundCertificate& c : certs) total += c.bound;
    return {{total, escape}};
  }
  for (BoundCertificate& c : certs) c.escape_time = escape;
  return certs;
}

void apply_change(std::span<Count> x, std::span<const Count> change) {
  if (change.size() != x.size()) {
    throw ModelError("change vector has " + std::to_string(change.size()) +
                     " entries, state has " + std::to_string(x.size()));
  }
  // Validate first so a failed change leaves x untouched.
  for (std::size_t i = 0; i < x.size(); ++i) {
    Count next;
    if (__builtin_add_overflow(x[i], change[i], &next)) {
      throw ModelError("species count overflow");
    }
    if (next < 0) {
      throw ModelError("reaction drove species " + std::to_string(i + 1) + " negative");
    }
  }
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += change[i];
}

}  // namespace issa
