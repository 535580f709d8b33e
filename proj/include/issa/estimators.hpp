#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "issa/couplings.hpp"
#include "issa/functional.hpp"
#include "issa/model.hpp"
#include "issa/random.hpp"
#include "issa/statistics.hpp"

namespace issa {

struct QuantityReport {
  std::string quantity;
  double estimate = 0.0;
  /// Per-sample variance for plain and level rows; the variance of the
  /// combined estimator for an MLMC total row.
  double variance = 0.0;
  double variance_se = 0.0;  // standard error of `variance` (plain rows)
  double half_width = 0.0;   // kZ95 * estimator standard deviation
  std::uint64_t n = 0;
  DrawCounter cost;
  double wall_seconds = 0.0;
};

struct EstimatorReport {
  std::vector<QuantityReport> rows;
  DrawCounter cost;
  double wall_seconds = 0.0;
  bool converged = true;  // false when a sample budget stopped the run
  std::string note;
};

/// Seeding and scheduling shared by every estimator. Sample i of an
/// experiment always uses the streams derived from (seed, experiment, i), so
/// results do not depend on `workers`.
struct RunControl {
  std::uint64_t seed = 0;
  std::uint64_t experiment = 0;
  unsigned workers = 0;  // 0: see resolve_workers
  std::uint64_t chunk = 256;
};

enum class ExactMethod { kExtrande, kHittingTime };

struct SensitivityJob {
  const ModelFamily* model = nullptr;
  Parameters parameters;  // defaults to model->parameters when empty
  std::string parameter;
  double h = 0.0;
  Functional functional;
  Coupling coupling = Coupling::kStacked;
  std::uint64_t n = 0;
  double T = 0.0;  // 0: the functional's horizon
  double window = 0.0;
  State initial;  // defaults to model->initial_state when empty
  /// false: report raw differences f(X) - f(Z) instead of dividing by h
  /// (h = 0 then couples two copies of the nominal model).
  bool quotient = true;
};

/// Centered finite differences (f(X^{theta+h/2}) - f(X^{theta-h/2})) / h over
/// n coupled pairs; one row per functional output.
EstimatorReport estimate_sensitivity(const SensitivityJob& job, const RunControl& run);

/// Per-output moments of the coupled difference quotient, for callers that
/// need more than the report (variance standard errors, time-grid curves).
std::vector<Moments> sensitivity_moments(const SensitivityJob& job, const RunControl& run,
                                         DrawCounter* cost = nullptr);

/// The recorded pair behind sample i of a sensitivity run.
CoupledPair sensitivity_pair(const SensitivityJob& job, const RunControl& run,
                             std::uint64_t sample);

struct DirectJob {
  const ModelFamily* model = nullptr;
  Parameters parameters;
  State initial;
  Functional functional;
  ExactMethod method = ExactMethod::kExtrande;
  double T = 0.0;
  std::uint64_t n = 0;       // fixed sample count, or
  double target_sd = 0.0;    // adaptive: grow n until every output's SE <= target
  std::uint64_t pilot = 100;
  std::uint64_t max_samples = 100'000'000;
  double window = 0.0;
  double tol = 1e-10;
};

/// Plain Monte Carlo over exact paths.
EstimatorReport estimate_direct(const DirectJob& job, const RunControl& run);

/// The recorded path behind sample i of a direct run.
TrajectoryPath direct_path(const DirectJob& job, const RunControl& run, std::uint64_t sample);

struct MlmcConfig {
  int M = 4;
  int ell0 = 2;
  int L = 3;
  double T = 0.0;
  /// h_l = step_scale * M^-l; zero means step_scale = T.
  double step_scale = 0.0;
  double target_sd = 0.1;
  std::vector<std::size_t> exact_channels;  // 0-based, excluded from Euler steps
  std::uint64_t pilot = 100;
  std::uint64_t max_samples = 100'000'000;  // per level

  double step(int level) const;
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct MlmcJob {
  const ModelFamily* model = nullptr;
  Parameters parameters;
  State initial;
  Functional functional;  // must have a single output
  MlmcConfig config;
};

/// Q = Q_E + sum_{l=ell0+1}^{L} Q_l + Q_{ell0}: exact-vs-finest corrector
/// (stacked coupling), coupled tau-leap level differences, and the coarsest
/// tau-leap level. Sample counts start at `pilot` per level and are grown to
/// n_l proportional to sqrt(V_l / C_l), C_l the mean random-variable count
/// per sample, until sum V_l / n_l <= target_sd^2. Rows: one per level, then
/// the total.
EstimatorReport estimate_mlmc(const MlmcJob& job, const RunControl& run);

}  // namespace issa
