#include "issa/experiment.hpp"

#include <fstream>
#include <stdexcept>

#include "issa/csv.hpp"
#include "issa/errors.hpp"

namespace issa {
namespace {

std::ofstream open_output(const std::string& path, const char* field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(field, "cannot write '" + path + "'");
  return out;
}

RunControl run_control(const ExperimentSpec& spec) {
  RunControl run;
  run.seed = spec.seed;
  run.experiment = spec.experiment;
  run.workers = spec.workers;
  return run;
}

std::vector<std::size_t> all_species(const ExperimentSpec& spec) {
  std::vector<std::size_t> s(spec.model.species.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
  return s;
}

std::vector<std::string> path_header(const ExperimentSpec& spec, bool pair) {
  std::vector<std::string> h{"path"};
  if (pair) h.push_back("process");
  h.push_back("time");
  for (const std::string& s : spec.model.species) h.push_back(s);
  return h;
}

void write_path(CsvWriter& csv, std::uint64_t index, const char* process,
                const TrajectoryPath& path) {
  auto emit = [&](double t, StateView x) {
    std::vector<std::string> row{format_number(index)};
    if (process != nullptr) row.emplace_back(process);
    row.push_back(format_number(t));
    for (Count c : x) row.push_back(format_number(static_cast<std::int64_t>(c)));
    csv.row(row);
  };
  emit(0.0, path.initial_state());
  for (std::size_t i = 0; i < path.jump_count(); ++i) emit(path.jump_times()[i], path.state(i));
  emit(path.t_end(), path.final_state());
}

void write_curve(const std::string& file, const ExperimentSpec& spec,
                 const std::vector<std::size_t>& species, const std::vector<Moments>& m) {
  std::ofstream out = open_output(file, "output.curve");
  CsvWriter csv(out);
  csv.row({"time", "species", "mean", "variance", "variance_se", "n"});
  const std::size_t d = species.size();
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const Moments& mm = m[i * d + j];
      csv.row({format_number(spec.grid[i]), spec.model.species[species[j]],
               format_number(mm.mean()), format_number(mm.variance()),
               format_number(mm.variance_standard_error()), format_number(mm.count())});
    }
  }
}

void check_grid(const ExperimentSpec& spec) {
  if (spec.grid.empty()) throw ConfigError("grid", "curve output needs a time grid");
  if (spec.grid.front() < 0.0 || spec.grid.back() > spec.horizon()) {
    throw ConfigError("grid", "grid times must lie in [0, T]");
  }
}

EstimatorReport run_simulate(const ExperimentSpec& spec) {
  const RunControl run = run_control(spec);
  DirectJob job;
  job.model = &spec.model;
  job.parameters = spec.parameters;
  job.initial = spec.initial;
  job.functional = spec.resolved_functional();
  job.method = spec.method;
  job.T = spec.horizon();
  job.n = spec.n;
  job.target_sd = spec.target_sd;
  job.window = spec.window;
  job.tol = spec.tol;
  if (job.target_sd <= 0.0 && job.n == 0) throw ConfigError("n", "must be > 0");
  EstimatorReport rep = estimate_direct(job, run);

  const std::uint64_t n = rep.rows.empty() ? job.n : rep.rows.front().n;
  if (!spec.output.paths.empty()) {
    std::ofstream out = open_output(spec.output.paths, "output.paths");
    CsvWriter csv(out);
    csv.row(path_header(spec, false));
    for (std::uint64_t i = 0; i < n; ++i) write_path(csv, i, nullptr, direct_path(job, run, i));
  }
  if (!spec.output.curve.empty()) {
    check_grid(spec);
    DirectJob grid_job = job;
    const auto species = all_species(spec);
    grid_job.functional = Functional::species_at(species, spec.grid);
    grid_job.target_sd = 0.0;
    grid_job.n = n;
    // Same streams, so the curve describes the paths behind the report.
    const EstimatorReport g = estimate_direct(grid_job, run);
    std::ofstream out = open_output(spec.output.curve, "output.curve");
    CsvWriter csv(out);
    csv.row({"time", "species", "mean", "variance", "variance_se", "n"});
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
      for (std::size_t j = 0; j < species.size(); ++j) {
        const QuantityReport& q = g.rows[i * species.size() + j];
        csv.row({format_number(spec.grid[i]), spec.model.species[j], format_number(q.estimate),
                 format_number(q.variance), format_number(q.variance_se), format_number(q.n)});
      }
    }
  }
  return rep;
}

EstimatorReport run_coupled(const ExperimentSpec& spec, bool quotient) {
  const RunControl run = run_control(spec);
  SensitivityJob job;
  job.model = &spec.model;
  job.parameters = spec.parameters;
  job.initial = spec.initial;
  job.parameter = spec.parameter;
  job.h = spec.h;
  job.coupling = spec.coupling;
  job.n = spec.n;
  job.T = spec.horizon();
  job.window = spec.window;
  job.quotient = quotient;
  job.functional = spec.resolved_functional();
  if (quotient && spec.parameter.empty()) {
    throw ConfigError("perturb", "sensitivity needs a perturbed parameter and h");
  }
  if (job.n == 0) throw ConfigError("n", "must be > 0");

  EstimatorReport rep;
  if (quotient) {
    rep = estimate_sensitivity(job, run);
  } else {
    DrawCounter cost;
    const std::vector<Moments> m = sensitivity_moments(job, run, &cost);
    for (std::size_t j = 0; j < m.size(); ++j) {
      QuantityReport q;
      q.quantity = "X-Z " + job.functional.label(j, spec.model.species);
      q.estimate = m[j].mean();
      q.variance = m[j].variance();
      q.variance_se = m[j].variance_standard_error();
      q.half_width = kZ95 * m[j].standard_error();
      q.n = m[j].count();
      q.cost = cost;
      rep.rows.push_back(q);
    }
    rep.cost = cost;
  }

  if (!spec.output.paths.empty()) {
    std::ofstream out = open_output(spec.output.paths, "output.paths");
    CsvWriter csv(out);
    csv.row(path_header(spec, true));
    for (std::uint64_t i = 0; i < job.n; ++i) {
      const CoupledPair pair = sensitivity_pair(job, run, i);
      write_path(csv, i, "x", pair.path_x);
      write_path(csv, i, "z", pair.path_z);
    }
  }
  if (!spec.output.curve.empty()) {
    check_grid(spec);
    SensitivityJob grid_job = job;
    const auto species = all_species(spec);
    grid_job.functional = Functional::species_at(species, spec.grid);
    write_curve(spec.output.curve, spec, species, sensitivity_moments(grid_job, run));
  }
  return rep;
}

EstimatorReport run_mlmc(const ExperimentSpec& spec) {
  if (!spec.output.paths.empty() || !spec.output.curve.empty()) {
    throw ConfigError("output", "mlmc writes only a report");
  }
  const RunControl run = run_control(spec);
  const Functional f = spec.resolved_functional();
  MlmcConfig cfg = spec.mlmc;
  cfg.T = spec.horizon();
  if (spec.target_sd > 0.0) cfg.target_sd = spec.target_sd;
  const std::size_t channels =
      spec.model.build(spec.parameters, spec.model.sample_environment(cfg.T, 0, 0, 0, 0))
          .channel_count();
  for (std::size_t k : cfg.exact_channels) {
    if (k >= channels) {
      throw ConfigError("mlmc.exact_channels", "channel " + std::to_string(k + 1) +
                                                   " does not exist");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("mlmc", e.what());
  }

  EstimatorReport rep;
  for (std::size_t j = 0; j < f.output_count(); ++j) {
    MlmcJob job;
    job.model = &spec.model;
    job.parameters = spec.parameters;
    job.initial = spec.initial;
    job.config = cfg;
    if (f.kind() == Functional::Kind::kExtinction) {
      job.functional = f;
    } else {
      const std::size_t s = f.species()[j % f.species().size()];
      const double t = f.times()[j / f.species().size()];
      job.functional = Functional::species_at(s, t);
    }
    const std::string label = f.label(j, spec.model.species);
    EstimatorReport part = estimate_mlmc(job, run);
    for (QuantityReport& q : part.rows) {
      if (q.quantity != label) q.quantity = label + " " + q.quantity;
      rep.rows.push_back(q);
    }
    rep.cost += part.cost;
    rep.wall_seconds += part.wall_seconds;
    rep.converged = rep.converged && part.converged;
    if (!part.note.empty()) rep.note = part.note;
  }
  return rep;
}

}  // namespace

void write_report(std::ostream& out, const EstimatorReport& report, bool timing) {
  CsvWriter csv(out);
  csv.row({"quantity", "estimate", "variance", "half_width", "n", "rv_count", "wall_seconds"});
  for (const QuantityReport& q : report.rows) {
    csv.row({q.quantity, format_number(q.estimate), format_number(q.variance),
             format_number(q.half_width), format_number(q.n), format_number(q.cost.total()),
             timing ? format_number(q.wall_seconds) : std::string()});
  }
}

EstimatorReport run_experiment(Command command, const ExperimentSpec& spec,
                               std::ostream* report_fallback) {
  EstimatorReport rep;
  switch (command) {
    case Command::kSimulate:
      rep = run_simulate(spec);
      break;
    case Command::kCouple:
      rep = run_coupled(spec, false);
      break;
    case Command::kSensitivity:
      rep = run_coupled(spec, true);
      break;
    case Command::kMlmc:
      rep = run_mlmc(spec);
      break;
  }
  if (!spec.output.report.empty()) {
    std::ofstream out = open_output(spec.output.report, "output.report");
    write_report(out, rep, spec.timing);
  } else if (report_fallback != nullptr) {
    write_report(*report_fallback, rep, spec.timing);
  }
  return rep;
}

}  // namespace issa
