#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "issa/couplings.hpp"
#include "issa/estimators.hpp"
#include "issa/functional.hpp"
#include "issa/model.hpp"

namespace issa {

enum class Command { kSimulate, kCouple, kSensitivity, kMlmc };

std::string_view to_string(Command c);
/// Throws std::invalid_argument for unknown names.
Command parse_command(std::string_view name);

struct OutputPaths {
  std::string report;  // estimator report CSV (stdout when empty)
  std::string paths;   // trajectory dump
  std::string curve;   // per-time summary over `grid`
};

/// Functional description resolved against the horizon at run time.
struct FunctionalSpec {
  bool extinction = false;
  std::vector<std::size_t> species;  // empty: every species (extinction: exactly one)
  std::vector<double> times;         // empty: the horizon
  double before = 0.0;               // extinction deadline; 0: the horizon
};

/// Everything needed to rerun an experiment bit for bit.
struct ExperimentSpec {
  ModelFamily model;
  Parameters parameters;  // full parameter map (model defaults plus overrides)
  State initial;

  std::uint64_t seed = 0;
  std::uint64_t experiment = 0;
  unsigned workers = 0;

  double T = 0.0;  // 0: the model's horizon
  std::uint64_t n = 1000;
  ExactMethod method = ExactMethod::kExtrande;
  Coupling coupling = Coupling::kStacked;
  double tol = 1e-10;
  double window = 0.0;

  std::string parameter;  // perturbed parameter (couple, sensitivity)
  double h = 0.0;

  FunctionalSpec functional;
  /// Times for curve output; empty means none.
  std::vector<double> grid;

  double target_sd = 0.0;  // simulate: adaptive sample size when > 0
  MlmcConfig mlmc;

  OutputPaths output;
  bool timing = false;

  double horizon() const { return T > 0.0 ? T : model.horizon; }
  Functional resolved_functional() const;
};

/// Parses the YAML experiment format (see README). Errors are ConfigError
/// with the dotted field path.
ExperimentSpec parse_config(std::string_view text);
ExperimentSpec load_config(const std::string& path);

/// Builds a model family from a `model:` mapping given as YAML text; exposed
/// for tests.
ModelFamily parse_model(std::string_view text);

/// Rate grammar:
///   const(c) | sine(offset, amplitude, period, phase) | pulse(k, s, phase)
///   | birth_pulse(m, s, phase) | modulated(scale) | <number>
/// Arguments are arithmetic expressions over numbers and parameter names
/// (+ - * / and parentheses). `env` is required for modulated rates.
RateFunction parse_rate(std::string_view text, const Parameters& params,
                        std::shared_ptr<const EnvironmentPath> env = nullptr,
                        double level_max = 0.0);

/// Arithmetic expression over numbers and parameter names.
double evaluate_expression(std::string_view text, const Parameters& params);

}  // namespace issa
