#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "issa/exact_sim.hpp"
#include "issa/network.hpp"
#include "issa/random.hpp"
#include "issa/trajectory.hpp"

namespace issa {

enum class Coupling { kIndependent, kCrn, kThinning, kStacked };

std::string_view to_string(Coupling c);
/// Accepts independent, crn, thinning, stacked. Throws std::invalid_argument.
Coupling parse_coupling(std::string_view name);

inline constexpr std::int32_t kNoChannel = -1;

/// One shared candidate event at which at least one process jumped.
struct SharedEvent {
  double time = 0.0;
  std::int32_t channel_x = kNoChannel;
  std::int32_t channel_z = kNoChannel;
};

struct CoupledPair {
  TrajectoryPath path_x;
  TrajectoryPath path_z;
  Coupling strategy = Coupling::kStacked;
  std::vector<SharedEvent> shared_event_log;  // thinning and stacked only
};

struct PairStats {
  SimStats x;
  SimStats z;
  DrawCounter draws;  // everything the pair consumed
  std::uint64_t candidates = 0;  // shared candidates (thinning, stacked)
  std::uint64_t both_fired = 0;
};

struct CouplingOptions {
  double window = 0.0;  // as ExtrandeOptions::window
  std::vector<SharedEvent>* event_log = nullptr;
};

/// Two Extrande runs on independent streams. Throws std::invalid_argument if
/// both streams have the same seed and id.
PairStats couple_independent(const ReactionNetwork& net_x, const ReactionNetwork& net_z,
                             StateView x0, StateView z0, double T, RandomStream& sx,
                             RandomStream& sz, PathObserver& ox, PathObserver& oz,
                             const CouplingOptions& options = {});

/// Common random numbers: each process runs its own Extrande loop on an
/// identical copy of `s`, so both consume the same exponential and uniform
/// sequence in the same order. Identical inputs give identical paths.
PairStats couple_crn(const ReactionNetwork& net_x, const ReactionNetwork& net_z,
                     StateView x0, StateView z0, double T, RandomStream& s,
                     PathObserver& ox, PathObserver& oz, const CouplingOptions& options = {});

/// Shared candidate times from the joint bound max(bound_X, bound_Z); one
/// uniform classifies each process against its own cumulative partition.
PairStats couple_thinning(const ReactionNetwork& net_x, const ReactionNetwork& net_z,
                          StateView x0, StateView z0, double T, RandomStream& s,
                          PathObserver& ox, PathObserver& oz,
                          const CouplingOptions& options = {});

/// Per-channel strips of height max(bound^X_k, bound^Z_k). A candidate lands
/// in one strip; X fires that channel if the offset within the strip is below
/// lambda^X_k, and likewise Z, so simultaneous jumps always share a channel.
PairStats couple_stacked(const ReactionNetwork& net_x, const ReactionNetwork& net_z,
                         StateView x0, StateView z0, double T, RandomStream& s,
                         PathObserver& ox, PathObserver& oz,
                         const CouplingOptions& options = {});

/// Dispatches on `strategy`. Streams are derived from (seed, experiment,
/// sample): roles "x" and "z" for the independent coupling, "pair" otherwise.
PairStats couple(Coupling strategy, const ReactionNetwork& net_x,
                 const ReactionNetwork& net_z, StateView x0, StateView z0, double T,
                 std::uint64_t seed, std::uint64_t experiment, std::uint64_t sample,
                 PathObserver& ox, PathObserver& oz, const CouplingOptions& options = {});

/// Convenience form that records both paths (and the shared event log for
/// thinning and stacked).
CoupledPair couple_paths(Coupling strategy, const ReactionNetwork& net_x,
                         const ReactionNetwork& net_z, StateView x0, StateView z0,
                         double T, std::uint64_t seed, std::uint64_t experiment,
                         std::uint64_t sample, double window = 0.0);

}  // namespace issa
