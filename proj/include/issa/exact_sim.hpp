#pragma once

#include <cstdint>

#include "issa/network.hpp"
#include "issa/random.hpp"
#include "issa/trajectory.hpp"

namespace issa {

/// Counters collected while simulating one process.
struct SimStats {
  DrawCounter draws;
  std::uint64_t candidates = 0;  // thinning candidates (or quadrature jumps)
  std::uint64_t accepted = 0;
  std::uint64_t phantom = 0;
  std::uint64_t escapes = 0;  // bound windows that expired before a candidate

  SimStats& operator+=(const SimStats& o) {
    draws += o.draws;
    candidates += o.candidates;
    accepted += o.accepted;
    phantom += o.phantom;
    escapes += o.escapes;
    return *this;
  }
};

struct ExtrandeOptions {
  /// Length of the bound-certification window. Zero selects the full
  /// remaining horizon when every channel has a global bound and 0.1 * T
  /// otherwise.
  double window = 0.0;
};

/// Exact simulation by thinning against a dominating total rate, with a
/// phantom channel absorbing the rejected mass. The bound is re-certified
/// after every candidate and whenever a certificate's escape time is reached.
/// Throws BoundViolation if an evaluated propensity exceeds its certificate.
SimStats simulate_extrande(const ReactionNetwork& net, StateView x0, double T,
                           RandomStream& stream, PathObserver& observer,
                           const ExtrandeOptions& options = {});
TrajectoryPath simulate_extrande(const ReactionNetwork& net, StateView x0, double T,
                                 RandomStream& stream, const ExtrandeOptions& options = {});

struct HittingTimeOptions {
  double tol = 1e-10;
  int max_iterations = 200;
  int max_depth = 50;  // adaptive Simpson recursion limit
};

/// Baseline simulator: each jump time solves
///   int_t^{t+D} lambda_0(s, x) ds = E,  E ~ Exp(1),
/// by adaptive Simpson quadrature inside a safeguarded Newton iteration.
/// The channel is chosen with probability lambda_k(t*, x) / lambda_0(t*, x).
/// Throws SimulationError (with the offending interval) if the quadrature or
/// root search does not converge.
SimStats simulate_hitting_time(const ReactionNetwork& net, StateView x0, double T,
                               RandomStream& stream, PathObserver& observer,
                               const HittingTimeOptions& options = {});
TrajectoryPath simulate_hitting_time(const ReactionNetwork& net, StateView x0, double T,
                                     RandomStream& stream,
                                     const HittingTimeOptions& options = {});

/// Solves int_t0^{t0+D} rate(s) ds = target for D, returning +infinity when
/// the integral up to t_max stays below target. Exposed for testing.
template <class Rate>
double solve_hitting_time(const Rate& rate, double t0, double t_max, double target,
                          const HittingTimeOptions& options);

}  // namespace issa

#include "issa/detail/hitting_time.hpp"
