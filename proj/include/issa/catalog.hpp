#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "issa/model.hpp"

namespace issa {

/// Modified Bessel function of the first kind, order zero,
///   I0(z) = (1/pi) int_0^pi exp(z cos x) dx.
/// Throws std::overflow_error for |z| > 700.
double bessel_i0(double z);

/// Scale of the seasonal birth pulse that makes its one-period mean equal m:
///   k = m exp(s/2) / I0(s/2).
double birth_pulse_scale(double m, double s);

/// B(t) = k exp(-s cos(pi t - phi)^2) with k = birth_pulse_scale(m, s).
double birth_pulse_rate(double t, double m, double s, double phi);

/// Transcription and translation (species M, P). Parameters c1..c4 are the
/// four rate constants (60, 100, 1, 1); `amplitude` adds a 24-hour sine to
/// the production of M (default 0). Horizon 10.
ModelFamily model1();

/// Transcription, translation and dimerization (species M, P, D) with
/// lambda_1(t) = c1 + theta sin(2 pi t / 24). Defaults theta = 15,
/// c1..c6 = 60, 100, 1, 1, 3e-7, 10; X(0) = (0, 1000, 0); horizon 20.
ModelFamily dimer();

/// SIR with seasonal birth pulses (time in years). Parameters m, gamma, R0,
/// s, phi, with beta = R0 (m + gamma); defaults 0.1, 26, 2, 10, 0 and
/// X(0) = (25000, 100, 24900) are illustrative guesses. Horizon 10.
ModelFamily sir();

/// S1 + S2 -> S3 with a Markov-modulated rate k1(t)/1000 (levels 0.5, 1.5,
/// 5), S3 -> S1 + S2 and S3 -> S2 + S4 at rate 1. X(0) = (1000, 1000, 0, 0);
/// horizon 2.
ModelFamily mmp();

/// Built-in model by name (model1, dimer, sir, mmp). Throws
/// std::invalid_argument for unknown names.
ModelFamily catalog_model(std::string_view name);
std::vector<std::string> catalog_names();

}  // namespace issa
