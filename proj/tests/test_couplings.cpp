#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "issa/catalog.hpp"
#include "issa/couplings.hpp"
#include "issa/errors.hpp"
#include "issa/functional.hpp"
#include "issa/statistics.hpp"

using namespace issa;

namespace {

constexpr std::uint64_t kSeed = 77;

ReactionNetwork births(std::vector<double> rates) {
  std::vector<ReactionChannel> ch;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    std::vector<Count> change(rates.size(), 0);
    change[k] = 1;
    ch.push_back({"b" + std::to_string(k + 1), change,
                  Propensity(RateFunction::constant(rates[k]), Kinetics::mass_action({}))});
  }
  std::vector<std::string> species;
  for (std::size_t k = 0; k < rates.size(); ++k) species.push_back("A" + std::to_string(k + 1));
  return ReactionNetwork(species, std::move(ch));
}

bool same_path(const TrajectoryPath& a, const TrajectoryPath& b) {
  if (a.jump_times() != b.jump_times() || a.channel_indices() != b.channel_indices()) return false;
  for (std::size_t i = 0; i < a.jump_count(); ++i) {
    for (std::size_t s = 0; s < a.species_count(); ++s) {
      if (a.state(i)[s] != b.state(i)[s]) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("coupling names") {
  for (Coupling c : {Coupling::kIndependent, Coupling::kCrn, Coupling::kThinning, Coupling::kStacked}) {
    CHECK(parse_coupling(to_string(c)) == c);
  }
  CHECK_THROWS_AS(parse_coupling("shared"), std::invalid_argument);
}

TEST_CASE("independent coupling rejects a shared stream") {
  const ReactionNetwork net = births({1.0});
  RandomStream a(kSeed, StreamId{0, 0, role_tag("x")});
  RandomStream b(kSeed, StreamId{0, 0, role_tag("x")});
  NullObserver ox, oz;
  CHECK_THROWS_AS(couple_independent(net, net, State{0}, State{0}, 1.0, a, b, ox, oz),
                  std::invalid_argument);
}

TEST_CASE("mismatched networks are rejected") {
  const ReactionNetwork a = births({1.0});
  const ReactionNetwork b = births({1.0, 2.0});
  CHECK_THROWS_AS(couple_paths(Coupling::kStacked, a, b, State{0}, State{0, 0}, 1.0, kSeed, 0, 0),
                  ModelError);
}

TEST_CASE("identical inputs give identical paths under crn, thinning and stacked") {
  const ModelFamily d = dimer();
  const ReactionNetwork net = d.build();
  for (Coupling c : {Coupling::kCrn, Coupling::kThinning, Coupling::kStacked}) {
    CAPTURE(to_string(c));
    for (std::uint64_t i = 0; i < 5; ++i) {
      const CoupledPair p = couple_paths(c, net, net, d.initial_state, d.initial_state, 5.0, kSeed, 0, i);
      CHECK(p.path_x.jump_count() > 0);
      CHECK(same_path(p.path_x, p.path_z));
    }
  }
}

TEST_CASE("crn paths need not share jump times") {
  const ReactionNetwork x = births({1.0});
  const ReactionNetwork z = births({2.0});
  const CoupledPair p = couple_paths(Coupling::kCrn, x, z, State{0}, State{0}, 20.0, kSeed, 0, 0);
  const std::set<double> tx(p.path_x.jump_times().begin(), p.path_x.jump_times().end());
  const std::set<double> tz(p.path_z.jump_times().begin(), p.path_z.jump_times().end());
  CHECK(tx != tz);
  CHECK(p.shared_event_log.empty());
}

TEST_CASE("thinning partition: region 2 sends X through channel 1 and Z through channel 2") {
  // X rates (2, 1), Z rates (1, 2), joint bound 3. The cumulative partitions
  // are X: [0,2) ch1, [2,3) ch2 and Z: [0,1) ch1, [1,3) ch2, so a candidate
  // in [1,2) is the split event; X on channel 2 with Z on channel 1 is
  // impossible.
  const ReactionNetwork x = births({2.0, 1.0});
  const ReactionNetwork z = births({1.0, 2.0});
  std::uint64_t total = 0, split = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const CoupledPair p =
        couple_paths(Coupling::kThinning, x, z, State{0, 0}, State{0, 0}, 50.0, kSeed, 0, i);
    for (const SharedEvent& e : p.shared_event_log) {
      ++total;
      REQUIRE(e.channel_x != kNoChannel);
      REQUIRE(e.channel_z != kNoChannel);
      REQUIRE_FALSE((e.channel_x == 1 && e.channel_z == 0));
      if (e.channel_x == 0 && e.channel_z == 1) ++split;
    }
  }
  const double f = static_cast<double>(split) / static_cast<double>(total);
  CHECK(std::fabs(f - 1.0 / 3.0) < 3.0 * std::sqrt((2.0 / 9.0) / static_cast<double>(total)));
}

TEST_CASE("stacked double-fire fraction equals the overlap") {
  // One channel, rates 2 and 3, strip height 3: both fire on 2/3 of candidates.
  const ReactionNetwork x = births({2.0});
  const ReactionNetwork z = births({3.0});
  std::uint64_t candidates = 0, both = 0;
  for (std::uint64_t i = 0; candidates < 100'000; ++i) {
    NullObserver ox, oz;
    const PairStats ps = couple(Coupling::kStacked, x, z, State{0}, State{0}, 100.0, kSeed, 0, i, ox, oz);
    candidates += ps.candidates;
    both += ps.both_fired;
  }
  const double f = static_cast<double>(both) / static_cast<double>(candidates);
  CHECK(std::fabs(f - 2.0 / 3.0) < 3.0 * std::sqrt((2.0 / 9.0) / static_cast<double>(candidates)));
}

TEST_CASE("stacked simultaneous jumps share the channel") {
  const ModelFamily d = dimer();
  const ReactionNetwork x = d.build(d.with(d.parameters, "theta", 15.05));
  const ReactionNetwork z = d.build(d.with(d.parameters, "theta", 14.95));
  std::uint64_t both = 0;
  for (std::uint64_t i = 0; i < 3; ++i) {
    const CoupledPair p = couple_paths(Coupling::kStacked, x, z, d.initial_state, d.initial_state,
                                       20.0, kSeed, 0, i);
    for (const SharedEvent& e : p.shared_event_log) {
      if (e.channel_x != kNoChannel && e.channel_z != kNoChannel) {
        ++both;
        REQUIRE(e.channel_x == e.channel_z);
      }
    }
  }
  CHECK(both > 10'000);
}

TEST_CASE("independent coupling: variances add and the mean difference vanishes") {
  // M of model1 only depends on R1 and R3; f = M(10), n = 1e5.
  const std::vector<std::size_t> keep{0, 2};
  const ReactionNetwork net = model1().build().subnetwork(keep);
  const Functional f = Functional::species_at(0, 10.0);
  Moments mx, mz, md;
  for (std::uint64_t i = 0; i < 100'000; ++i) {
    FunctionalObserver ox(f, 2), oz(f, 2);
    couple(Coupling::kIndependent, net, net, State{0, 0}, State{0, 0}, 10.0, kSeed, 0, i, ox, oz);
    mx.add(ox.values()[0]);
    mz.add(oz.values()[0]);
    md.add(ox.values()[0] - oz.values()[0]);
  }
  const double sum = mx.variance() + mz.variance();
  CHECK(std::fabs(md.variance() / sum - 1.0) < 0.05);
  CHECK(std::fabs(md.mean()) < 3.0 * md.standard_error());
}

TEST_CASE("coupling is deterministic per (seed, experiment, sample)") {
  const ModelFamily d = dimer();
  const ReactionNetwork x = d.build(d.with(d.parameters, "theta", 16.0));
  const ReactionNetwork z = d.build();
  for (Coupling c : {Coupling::kIndependent, Coupling::kCrn, Coupling::kThinning, Coupling::kStacked}) {
    CAPTURE(to_string(c));
    const CoupledPair a = couple_paths(c, x, z, d.initial_state, d.initial_state, 3.0, kSeed, 2, 5);
    const CoupledPair b = couple_paths(c, x, z, d.initial_state, d.initial_state, 3.0, kSeed, 2, 5);
    const CoupledPair other = couple_paths(c, x, z, d.initial_state, d.initial_state, 3.0, kSeed, 3, 5);
    CHECK(same_path(a.path_x, b.path_x));
    CHECK(same_path(a.path_z, b.path_z));
    CHECK_FALSE(same_path(a.path_x, other.path_x));
  }
}
