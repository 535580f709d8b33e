#include "issa/model.hpp"

#include <stdexcept>

#include "issa/errors.hpp"

namespace issa {

ReactionNetwork ModelFamily::build(const Parameters& p,
                                   std::shared_ptr<const EnvironmentPath> env) const {
  if (!builder) throw ModelError("model '" + name + "' has no network builder");
  if (environment && env == nullptr) {
    throw ModelError("model '" + name + "' needs a sampled environment path");
  }
  return builder(p, std::move(env));
}

Parameters ModelFamily::with(const Parameters& base, const std::string& parameter,
                             double value) const {
  if (!parameters.contains(parameter)) {
    std::string known;
    for (const auto& [k, v] : parameters) known += (known.empty() ? "" : ", ") + k;
    throw std::invalid_argument("model '" + name + "' has no parameter '" + parameter +
                                "' (known: " + known + ")");
  }
  Parameters out = base;
  out[parameter] = value;
  return out;
}

std::shared_ptr<const EnvironmentPath> ModelFamily::sample_environment(
    double T, std::uint64_t seed, std::uint64_t experiment, std::uint64_t sample,
    std::uint64_t role, DrawCounter* cost) const {
  if (!environment) return nullptr;
  RandomStream s(seed, {experiment, sample, role});
  auto path = std::make_shared<EnvironmentPath>(simulate_environment(*environment, T, s));
  if (cost != nullptr) *cost += s.draws();
  return path;
}

std::size_t ModelFamily::species_index(std::string_view n) const {
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (species[i] == n) return i;
  }
  throw std::invalid_argument("model '" + name + "' has no species '" + std::string(n) + "'");
}

}  // namespace issa
