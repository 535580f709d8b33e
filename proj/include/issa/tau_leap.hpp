#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "issa/couplings.hpp"
#include "issa/exact_sim.hpp"
#include "issa/network.hpp"
#include "issa/random.hpp"
#include "issa/trajectory.hpp"

namespace issa {

struct TauStats {
  DrawCounter draws;
  std::uint64_t steps = 0;
  std::uint64_t clipped = 0;  // coordinates projected back to zero
  std::uint64_t exact_jumps = 0;
};

/// Number of steps of size h in [0, T]. Throws std::invalid_argument unless
/// h divides T (to a relative 1e-9).
std::size_t step_count(double T, double h);

/// Euler tau-leap with step h. Channels not listed in `exact_channels`
/// (0-based) fire Poisson(lambda_k(t_n, Z(t_n)) * h) times per step; their
/// changes are applied together at the step end, clipping negative
/// coordinates to zero. Listed channels fire as exact jumps inside the step,
/// driven by the live state (grid state plus exact changes so far).
TauStats simulate_tau_leap(const ReactionNetwork& net, StateView x0, double T, double h,
                           RandomStream& stream, PathObserver& observer,
                           std::span<const std::size_t> exact_channels = {});
TrajectoryPath simulate_tau_leap(const ReactionNetwork& net, StateView x0, double T,
                                 double h, RandomStream& stream,
                                 std::span<const std::size_t> exact_channels = {});

struct LevelPairStats {
  TauStats fine;
  TauStats coarse;
  DrawCounter draws;
};

/// Coupled tau-leap pair on one network: fine step h, coarse step M * h.
/// Every fine step draws, per Euler channel, three Poisson counts with means
/// h*min(a_f, a_c), h*(a_f - min), h*(a_c - min), where a_c is held over the
/// enclosing coarse step. The fine process takes counts 1+2 at the fine step
/// end; the coarse process accumulates counts 1+3 and applies them at the
/// coarse step end. Exact channels are coupled by stacked thinning.
LevelPairStats couple_tau_leap_pair(const ReactionNetwork& net, StateView x0, double T,
                                    double h_fine, int M, RandomStream& stream,
                                    PathObserver& fine, PathObserver& coarse,
                                    std::span<const std::size_t> exact_channels = {});
/// path_x is the fine process, path_z the coarse one.
CoupledPair couple_tau_leap_pair(const ReactionNetwork& net, StateView x0, double T,
                                 double h_fine, int M, RandomStream& stream,
                                 std::span<const std::size_t> exact_channels = {});

struct ExactTauStats {
  SimStats x;
  TauStats z;
  DrawCounter draws;
  std::uint64_t both_fired = 0;
};

/// Stacked coupling of the exact process X with the tau-leap process Z of
/// step h. Z's Euler channels have the step-frozen propensity
/// lambda_k(t_n, Z(t_n)), their firings buffered until the step end; Z's
/// exact channels use the live state. Strip heights are refreshed at every
/// candidate and at every step boundary.
ExactTauStats couple_exact_tau(const ReactionNetwork& net, StateView x0, double T, double h,
                               RandomStream& stream, PathObserver& ox, PathObserver& oz,
                               std::span<const std::size_t> exact_channels = {},
                               std::vector<SharedEvent>* event_log = nullptr);
CoupledPair couple_exact_tau(const ReactionNetwork& net, StateView x0, double T, double h,
                             RandomStream& stream,
                             std::span<const std::size_t> exact_channels = {});

}  // namespace issa
