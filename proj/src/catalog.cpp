#include "issa/catalog.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "issa/errors.hpp"

namespace issa {
namespace {

std::vector<Count> change(std::initializer_list<Count> v) { return v; }

Propensity mass_action(RateFunction rate, std::vector<Reactant> reactants) {
  return {std::move(rate), Kinetics::mass_action(std::move(reactants))};
}

double param(const Parameters& p, const char* name) {
  const auto it = p.find(name);
  if (it == p.end()) throw ModelError(std::string("missing parameter '") + name + "'");
  return it->second;
}

// exp(-a) I0(a) for a >= 0. The integrand exp(a cos x) is smooth and
// 2pi-periodic, so the midpoint rule over a half period converges
// geometrically; factoring out exp(a) keeps every term in [exp(-2a), 1].
double bessel_i0_scaled(double a) {
  const int n = 64 + static_cast<int>(2.0 * a);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = std::numbers::pi * (2.0 * j + 1.0) / (2.0 * n);
    sum += std::exp(a * (std::cos(x) - 1.0));
  }
  return sum / n;
}

}  // namespace

double bessel_i0(double z) {
  if (!std::isfinite(z)) throw std::domain_error("bessel_i0 argument must be finite");
  const double a = std::fabs(z);
  if (a > 700.0) throw std::overflow_error("bessel_i0 argument too large (|z| > 700)");
  return std::exp(a) * bessel_i0_scaled(a);
}

double birth_pulse_scale(double m, double s) {
  if (!(m > 0.0)) throw ModelError("birth pulse needs m > 0");
  if (!(s >= 0.0) || !std::isfinite(s)) throw ModelError("birth pulse needs finite s >= 0");
  return m / bessel_i0_scaled(0.5 * s);
}

double birth_pulse_rate(double t, double m, double s, double phi) {
  const double c = std::cos(std::numbers::pi * t - phi);
  return birth_pulse_scale(m, s) * std::exp(-s * c * c);
}

ModelFamily model1() {
  ModelFamily f;
  f.name = "model1";
  f.species = {"M", "P"};
  f.parameters = {{"c1", 60.0}, {"c2", 100.0}, {"c3", 1.0}, {"c4", 1.0}, {"amplitude", 0.0}};
  f.initial_state = {0, 0};
  f.horizon = 10.0;
  f.builder = [](const Parameters& p, std::shared_ptr<const EnvironmentPath>) {
    const double amp = param(p, "amplitude");
    RateFunction r1 = amp == 0.0 ? RateFunction::constant(param(p, "c1"))
                                 : RateFunction::sine(param(p, "c1"), amp, 24.0, 0.0);
    std::vector<ReactionChannel> ch;
    ch.push_back({"R1", change({1, 0}), mass_action(r1, {})});
    ch.push_back({"R2", change({0, 1}), mass_action(RateFunction::constant(param(p, "c2")), {{0, 1}})});
    ch.push_back({"R3", change({-1, 0}), mass_action(RateFunction::constant(param(p, "c3")), {{0, 1}})});
    ch.push_back({"R4", change({0, -1}), mass_action(RateFunction::constant(param(p, "c4")), {{1, 1}})});
    return ReactionNetwork({"M", "P"}, std::move(ch));
  };
  return f;
}

ModelFamily dimer() {
  ModelFamily f;
  f.name = "dimer";
  f.species = {"M", "P", "D"};
  f.parameters = {{"theta", 15.0}, {"c1", 60.0}, {"c2", 100.0}, {"c3", 1.0},
                  {"c4", 1.0},     {"c5", 3e-7}, {"c6", 10.0}};
  f.initial_state = {0, 1000, 0};
  f.horizon = 20.0;
  f.builder = [](const Parameters& p, std::shared_ptr<const EnvironmentPath>) {
    std::vector<ReactionChannel> ch;
    ch.push_back({"R1", change({1, 0, 0}),
                  mass_action(RateFunction::sine(param(p, "c1"), param(p, "theta"), 24.0, 0.0), {})});
    ch.push_back({"R2", change({0, 1, 0}), mass_action(RateFunction::constant(param(p, "c2")), {{0, 1}})});
    ch.push_back({"R3", change({-1, 0, 0}), mass_action(RateFunction::constant(param(p, "c3")), {{0, 1}})});
    ch.push_back({"R4", change({0, -1, 0}), mass_action(RateFunction::constant(param(p, "c4")), {{1, 1}})});
    ch.push_back({"R5", change({0, -2, 1}), mass_action(RateFunction::constant(param(p, "c5")), {{1, 2}})});
    ch.push_back({"R6", change({0, 0, -1}), mass_action(RateFunction::constant(param(p, "c6")), {{2, 1}})});
    return ReactionNetwork({"M", "P", "D"}, std::move(ch));
  };
  return f;
}

ModelFamily sir() {
  ModelFamily f;
  f.name = "sir";
  f.species = {"S", "I", "R"};
  f.parameters = {{"m", 0.1}, {"gamma", 26.0}, {"R0", 2.0}, {"s", 10.0}, {"phi", 0.0}};
  // Guess values: the population is large enough that extinction within the
  // horizon is neither rare nor certain; S starts at its endemic level N/R0.
  f.initial_state = {25000, 100, 24900};
  f.horizon = 10.0;
  f.builder = [](const Parameters& p, std::shared_ptr<const EnvironmentPath>) {
    const double m = param(p, "m");
    const double gamma = param(p, "gamma");
    const double beta = param(p, "R0") * (m + gamma);
    const double s = param(p, "s");
    const RateFunction births =
        RateFunction::pulse(birth_pulse_scale(m, s), s, param(p, "phi"));
    std::vector<ReactionChannel> ch;
    ch.push_back({"R1", change({1, 0, 0}), Propensity(births, Kinetics::population({0, 1, 2}))});
    ch.push_back({"R2", change({-1, 0, 0}), mass_action(RateFunction::constant(m), {{0, 1}})});
    ch.push_back({"R3", change({0, -1, 0}), mass_action(RateFunction::constant(m), {{1, 1}})});
    ch.push_back({"R4", change({0, 0, -1}), mass_action(RateFunction::constant(m), {{2, 1}})});
    ch.push_back({"R5", change({-1, 1, 0}),
                  Propensity(RateFunction::constant(beta), Kinetics::frequency(0, 1, {0, 1, 2}))});
    ch.push_back({"R6", change({0, -1, 1}), mass_action(RateFunction::constant(gamma), {{1, 1}})});
    return ReactionNetwork({"S", "I", "R"}, std::move(ch));
  };
  return f;
}

ModelFamily mmp() {
  ModelFamily f;
  f.name = "mmp";
  f.species = {"S1", "S2", "S3", "S4"};
  f.parameters = {{"scale", 1e-3}, {"c2", 1.0}, {"c3", 1.0}};
  f.initial_state = {1000, 1000, 0, 0};
  f.horizon = 2.0;
  EnvironmentModel env;
  env.levels = {0.5, 1.5, 5.0};
  env.transitions = {{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}};
  env.initial_index = 0;
  env.holding_rate = 1.0;
  const double level_max = env.max_level();
  f.environment = env;
  f.builder = [level_max](const Parameters& p, std::shared_ptr<const EnvironmentPath> path) {
    std::vector<ReactionChannel> ch;
    ch.push_back({"R1", change({-1, -1, 1, 0}),
                  mass_action(RateFunction::modulated(std::move(path), param(p, "scale"), level_max),
                              {{0, 1}, {1, 1}})});
    ch.push_back({"R2", change({1, 1, -1, 0}), mass_action(RateFunction::constant(param(p, "c2")), {{2, 1}})});
    ch.push_back({"R3", change({0, 1, -1, 1}), mass_action(RateFunction::constant(param(p, "c3")), {{2, 1}})});
    return ReactionNetwork({"S1", "S2", "S3", "S4"}, std::move(ch));
  };
  return f;
}

ModelFamily catalog_model(std::string_view name) {
  if (name == "model1") return model1();
  if (name == "dimer") return dimer();
  if (name == "sir") return sir();
  if (name == "mmp") return mmp();
  throw std::invalid_argument("unknown catalog model '" + std::string(name) +
                              "' (expected model1, dimer, sir or mmp)");
}

std::vector<std::string> catalog_names() { return {"model1", "dimer", "sir", "mmp"}; }

}  // namespace issa
