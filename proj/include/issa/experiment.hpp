#pragma once

#include <ostream>

#include "issa/config.hpp"
#include "issa/estimators.hpp"

namespace issa {

/// Runs one experiment and writes the files named in spec.output:
///   report  quantity, estimate, variance, half_width, n, rv_count, wall_seconds
///           (`report_fallback` receives it when no report path is set)
///   paths   simulate: path, time, species...; couple/sensitivity: path,
///           process, time, species... (one row per jump plus t=0 and t=T)
///   curve   time, species, mean, variance, variance_se, n over spec.grid
///           (simulate: X; couple: X - Z; sensitivity: the difference quotient)
/// Given the spec, every file is byte-identical across reruns and worker
/// counts; wall_seconds is left empty unless spec.timing is set.
EstimatorReport run_experiment(Command command, const ExperimentSpec& spec,
                               std::ostream* report_fallback = nullptr);

void write_report(std::ostream& out, const EstimatorReport& report, bool timing);

}  // namespace issa
