// inhomog-ssa: exact simulation, couplings, sensitivities and MLMC for
// time-inhomogeneous reaction networks.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "issa/catalog.hpp"
#include "issa/config.hpp"
#include "issa/errors.hpp"
#include "issa/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;

struct Flags {
  std::string config;
  std::optional<std::string> model;
  std::optional<double> T;
  std::optional<std::uint64_t> n;
  std::optional<std::string> method;
  std::optional<std::string> coupling;
  std::optional<std::string> param;
  std::optional<double> h;
  std::optional<double> target_sd;
  std::optional<int> M;
  std::optional<std::string> levels;
  std::optional<double> step_scale;
  std::optional<std::string> exact_channels;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> experiment;
  std::optional<unsigned> workers;
  std::optional<double> window;
  std::optional<double> tol;
  std::optional<std::string> species;
  std::optional<std::string> times;
  std::optional<std::string> grid;
  std::vector<std::string> set;
  std::optional<std::string> out;
  std::optional<std::string> paths;
  std::optional<std::string> curve;
  bool timing = false;
};

void add_flags(CLI::App& cmd, Flags& f) {
  // -h would clash with the perturbation size --h.
  cmd.set_help_flag("--help", "print this help message and exit");
  cmd.add_option("--config", f.config, "YAML experiment file");
  cmd.add_option("--model", f.model, "built-in model: model1, dimer, sir, mmp");
  cmd.add_option("--T", f.T, "time horizon");
  cmd.add_option("--n", f.n, "number of paths or pairs");
  cmd.add_option("--method", f.method, "extrande or hitting-time");
  cmd.add_option("--coupling", f.coupling, "independent, crn, thinning or stacked");
  cmd.add_option("--param", f.param, "parameter to perturb");
  cmd.add_option("--h", f.h, "perturbation size (centered: theta +/- h/2)");
  cmd.add_option("--target-sd", f.target_sd, "target estimator standard deviation");
  cmd.add_option("--M", f.M, "MLMC refinement factor");
  cmd.add_option("--levels", f.levels, "MLMC levels as ell0:L, e.g. 2:3");
  cmd.add_option("--step-scale", f.step_scale, "MLMC step h_l = scale * M^-l (0: T)");
  cmd.add_option("--exact-channels", f.exact_channels,
                 "comma-separated 1-based channels simulated exactly inside tau-leap");
  cmd.add_option("--seed", f.seed, "master seed");
  cmd.add_option("--experiment", f.experiment, "experiment index");
  cmd.add_option("--workers", f.workers, "worker threads (0: ISSA_THREADS or all cores)");
  cmd.add_option("--window", f.window, "bound certification window (0: automatic)");
  cmd.add_option("--tol", f.tol, "hitting-time tolerance");
  cmd.add_option("--species", f.species, "comma-separated species for the outputs");
  cmd.add_option("--times", f.times, "comma-separated output times");
  cmd.add_option("--grid", f.grid, "curve times as start:stop:step");
  cmd.add_option("--set", f.set, "parameter override name=value (repeatable)");
  cmd.add_option("--out", f.out, "report CSV (default: stdout)");
  cmd.add_option("--paths", f.paths, "trajectory CSV");
  cmd.add_option("--curve", f.curve, "time-grid summary CSV");
  cmd.add_flag("--timing", f.timing, "fill the wall_seconds column");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double number(const std::string& s, const char* field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw issa::ConfigError(field, "expected a number, got '" + s + "'");
  }
}

issa::ExperimentSpec build_spec(const Flags& f) {
  using issa::ConfigError;
  issa::ExperimentSpec spec;
  if (!f.config.empty()) {
    spec = issa::load_config(f.config);
  } else if (!f.model) {
    throw ConfigError("model", "give --config or --model");
  }
  if (f.model) {
    try {
      spec.model = issa::catalog_model(*f.model);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("model", e.what());
    }
    spec.parameters = spec.model.parameters;
    spec.initial = spec.model.initial_state;
    spec.functional = {};
  }
  for (const std::string& kv : f.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("set", "expected name=value, got '" + kv + "'");
    const std::string name = kv.substr(0, eq);
    if (!spec.parameters.contains(name)) {
      throw ConfigError("set." + name, "model has no such parameter");
    }
    spec.parameters[name] = number(kv.substr(eq + 1), "set");
  }
  if (f.T) {
    if (!(*f.T > 0.0)) throw ConfigError("T", "must be > 0");
    spec.T = *f.T;
  }
  if (f.n) spec.n = *f.n;
  if (f.method) {
    if (*f.method == "extrande") {
      spec.method = issa::ExactMethod::kExtrande;
    } else if (*f.method == "hitting-time") {
      spec.method = issa::ExactMethod::kHittingTime;
    } else {
      throw ConfigError("method", "expected extrande or hitting-time");
    }
  }
  if (f.coupling) {
    try {
      spec.coupling = issa::parse_coupling(*f.coupling);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("coupling", e.what());
    }
  }
  if (f.param) {
    if (!spec.parameters.contains(*f.param)) {
      throw ConfigError("param", "model has no parameter '" + *f.param + "'");
    }
    spec.parameter = *f.param;
  }
  if (f.h) {
    if (!(*f.h > 0.0)) throw ConfigError("h", "must be > 0");
    spec.h = *f.h;
  }
  if (!spec.parameter.empty() && spec.h == 0.0) {
    // Default perturbation: 5% of the nominal value.
    spec.h = 0.05 * std::abs(spec.parameters.at(spec.parameter));
  }
  if (f.target_sd) {
    if (!(*f.target_sd > 0.0)) throw ConfigError("target_sd", "must be > 0");
    spec.target_sd = *f.target_sd;
  }
  if (f.M) spec.mlmc.M = *f.M;
  if (f.levels) {
    const auto parts = split(*f.levels, ':');
    if (parts.size() != 2) throw ConfigError("levels", "expected ell0:L");
    spec.mlmc.ell0 = static_cast<int>(number(parts[0], "levels"));
    spec.mlmc.L = static_cast<int>(number(parts[1], "levels"));
  }
  if (f.step_scale) spec.mlmc.step_scale = *f.step_scale;
  if (f.exact_channels) {
    spec.mlmc.exact_channels.clear();
    for (const std::string& s : split(*f.exact_channels, ',')) {
      if (s.empty()) continue;
      const double k = number(s, "exact_channels");
      if (k < 1 || k != static_cast<double>(static_cast<std::size_t>(k))) {
        throw ConfigError("exact_channels", "channels are numbered from 1");
      }
      spec.mlmc.exact_channels.push_back(static_cast<std::size_t>(k) - 1);
    }
  }
  if (f.seed) spec.seed = *f.seed;
  if (f.experiment) spec.experiment = *f.experiment;
  if (f.workers) spec.workers = *f.workers;
  if (f.window) spec.window = *f.window;
  if (f.tol) spec.tol = *f.tol;
  if (f.species) {
    spec.functional.extinction = false;
    spec.functional.species.clear();
    for (const std::string& s : split(*f.species, ',')) {
      try {
        spec.functional.species.push_back(spec.model.species_index(s));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("species", e.what());
      }
    }
  }
  if (f.times) {
    spec.functional.extinction = false;
    spec.functional.times.clear();
    for (const std::string& s : split(*f.times, ',')) {
      spec.functional.times.push_back(number(s, "times"));
    }
  }
  if (f.grid) {
    const auto parts = split(*f.grid, ':');
    if (parts.size() != 3) throw ConfigError("grid", "expected start:stop:step");
    const double a = number(parts[0], "grid");
    const double b = number(parts[1], "grid");
    const double step = number(parts[2], "grid");
    if (!(step > 0.0) || !(b >= a)) throw ConfigError("grid", "need step > 0 and stop >= start");
    spec.grid.clear();
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i) spec.grid.push_back(a + static_cast<double>(i) * step);
  }
  if (f.out) spec.output.report = *f.out;
  if (f.paths) spec.output.paths = *f.paths;
  if (f.curve) spec.output.curve = *f.curve;
  if (f.timing) spec.timing = true;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulation and variance-reduced estimation for time-inhomogeneous "
               "reaction networks"};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<CLI::App*, issa::Command>> commands;
  const std::pair<const char*, const char*> defs[] = {
      {"simulate", "exact paths (Extrande or hitting-time) and Monte Carlo means"},
      {"couple", "coupled pairs at theta +/- h/2 and their differences"},
      {"sensitivity", "finite-difference sensitivity over coupled pairs"},
      {"mlmc", "multilevel Monte Carlo with an exact corrector level"},
  };
  for (const auto& [name, help] : defs) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_flags(*cmd, flags);
    commands.emplace_back(cmd, issa::parse_command(name));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  issa::Command command = issa::Command::kSimulate;
  for (const auto& [cmd, c] : commands) {
    if (cmd->parsed()) command = c;
  }

  try {
    const issa::ExperimentSpec spec = build_spec(flags);
    const issa::EstimatorReport rep = issa::run_experiment(command, spec, &std::cout);
    if (!rep.note.empty()) std::cerr << "note: " << rep.note << "\n";
    return 0;
  } catch (const issa::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const issa::BoundViolation& e) {
    std::cerr << "bound violation: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const issa::SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << " (interval [" << e.interval_begin()
              << ", " << e.interval_end() << "])\n";
    return kExitSimulation;
  } catch (const issa::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
