#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "issa/environment.hpp"
#include "issa/network.hpp"

namespace issa {

using Parameters = std::map<std::string, double>;

/// A network family indexed by named scalar parameters, optionally driven by
/// a random environment that is drawn once per sample and shared by every
/// process simulated for that sample.
struct ModelFamily {
  using Builder = std::function<ReactionNetwork(const Parameters&,
                                                std::shared_ptr<const EnvironmentPath>)>;

  std::string name;
  std::vector<std::string> species;
  Parameters parameters;
  State initial_state;
  double horizon = 1.0;
  std::optional<EnvironmentModel> environment;
  Builder builder;

  ReactionNetwork build(const Parameters& p,
                        std::shared_ptr<const EnvironmentPath> env = nullptr) const;
  ReactionNetwork build() const { return build(parameters); }

  /// Copy of `base` with one parameter replaced. Throws std::invalid_argument
  /// for unknown names.
  Parameters with(const Parameters& base, const std::string& parameter, double value) const;

  /// Environment path for one sample, drawn from stream (seed, experiment,
  /// sample, role). Returns nullptr for models without an environment.
  /// Variates consumed are added to `cost` when given.
  std::shared_ptr<const EnvironmentPath> sample_environment(
      double T, std::uint64_t seed, std::uint64_t experiment, std::uint64_t sample,
      std::uint64_t role, DrawCounter* cost = nullptr) const;

  /// Throws std::invalid_argument for unknown names.
  std::size_t species_index(std::string_view name) const;
};

}  // namespace issa
