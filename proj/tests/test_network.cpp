#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "issa/catalog.hpp"
#include "issa/errors.hpp"
#include "issa/network.hpp"
#include "issa/random.hpp"

using namespace issa;

TEST_CASE("total propensity") {
  SUBCASE("model1 at the origin: only the source fires") {
    const ReactionNetwork net = model1().build();
    const State x{0, 0};
    CHECK(total_propensity(net, 0.0, x) == 60.0);
  }
  SUBCASE("dimer at t=6") {
    const ReactionNetwork net = dimer().build();
    const State x{0, 1000, 0};
    CHECK(total_propensity(net, 6.0, x) == doctest::Approx(1075.14985).epsilon(1e-14));
  }
}

TEST_CASE("mass action") {
  const std::vector<Reactant> linear{{0, 1}};
  CHECK(mass_action_propensity(RateFunction::constant(100.0), linear, State{3, 50}, 0.0) == 300.0);
  CHECK(mass_action_propensity(RateFunction::constant(2.5), linear, State{0, 50}, 0.0) == 0.0);
  const std::vector<Reactant> dimerize{{1, 2}};
  CHECK(mass_action_propensity(RateFunction::constant(3e-7), dimerize, State{0, 1000, 0}, 0.0) ==
        doctest::Approx(0.14985).epsilon(1e-14));
  CHECK(mass_action_propensity(RateFunction::constant(3e-7), dimerize, State{0, 1, 0}, 0.0) == 0.0);
  // Source reaction: empty reactant list.
  CHECK(mass_action_propensity(RateFunction::constant(7.0), {}, State{0}, 0.0) == 7.0);
}

TEST_CASE("kinetics factors") {
  CHECK(Kinetics::population({0, 2}).factor(State{3, 100, 4}) == 7.0);
  CHECK(Kinetics::frequency(0, 1, {0, 1, 2}).factor(State{10, 6, 4}) == 3.0);
  CHECK(Kinetics::frequency(0, 1, {0, 1, 2}).factor(State{0, 0, 0}) == 0.0);
  CHECK(Kinetics::mass_action({{0, 1}, {1, 1}}).factor(State{4, 5}) == 20.0);
  CHECK(Kinetics::mass_action({{0, 3}}).factor(State{5}) == 10.0);
}

TEST_CASE("certify_bound examples") {
  SUBCASE("dimer R1 is bounded by 75 on any window") {
    const ReactionNetwork net = dimer().build();
    const State x{0, 1000, 0};
    for (auto [t0, t1] : {std::pair{0.0, 20.0}, {5.5, 6.5}, {13.0, 13.1}, {100.0, 250.0}}) {
      const auto c = certify_bound(net, t0, t1, x, BoundMode::kPerChannel);
      REQUIRE(c.size() == net.channel_count());
      CHECK(c[0].bound == 75.0);
      CHECK(c[0].escape_time == t1);
    }
  }
  SUBCASE("constant rate") {
    const ReactionNetwork net({"A"}, {{"birth", {1}, Propensity(RateFunction::constant(2.0),
                                                                Kinetics::mass_action({}))}});
    const auto c = certify_bound(net, 1.0, 4.0, State{0}, BoundMode::kPerChannel);
    CHECK(c[0].bound == 2.0);
    CHECK(c[0].escape_time == 4.0);
  }
  SUBCASE("mmp R1 uses the largest environment level") {
    const ModelFamily m = mmp();
    const auto env = m.sample_environment(2.0, 1, 0, 0, role_tag("env"));
    const ReactionNetwork net = m.build(m.parameters, env);
    const State x{1000, 800, 0, 0};
    const auto c = certify_bound(net, 0.0, 2.0, x, BoundMode::kPerChannel);
    CHECK(c[0].bound == doctest::Approx(5.0 / 1000.0 * 1000.0 * 800.0));
    CHECK(c[0].escape_time == 2.0);
  }
  SUBCASE("total mode sums the channels") {
    const ReactionNetwork net = dimer().build();
    const State x{5, 1000, 3};
    const auto per = certify_bound(net, 0.0, 1.0, x, BoundMode::kPerChannel);
    const auto tot = certify_bound(net, 0.0, 1.0, x, BoundMode::kTotal);
    REQUIRE(tot.size() == 1);
    double s = 0.0;
    for (const auto& c : per) s += c.bound;
    CHECK(tot[0].bound == doctest::Approx(s));
  }
}

TEST_CASE("certificates dominate on dense samples") {
  // Every catalog channel, random states and windows, 2000 interior points.
  RandomStream rng(3, StreamId{0, 0, role_tag("dense")});
  for (const std::string& name : catalog_names()) {
    const ModelFamily m = catalog_model(name);
    const auto env = m.sample_environment(m.horizon, 3, 0, 0, role_tag("env"));
    const ReactionNetwork net = m.build(m.parameters, env);
    for (int trial = 0; trial < 20; ++trial) {
      State x(net.species_count());
      for (Count& c : x) c = static_cast<Count>(rng.uniform() * 2000.0);
      const double t0 = rng.uniform() * m.horizon;
      const double t1 = t0 + rng.uniform() * m.horizon;
      const auto cert = certify_bound(net, t0, t1, x, BoundMode::kPerChannel);
      for (std::size_t k = 0; k < net.channel_count(); ++k) {
        CHECK(cert[k].bound >= 0.0);
        CHECK(cert[k].escape_time > t0);
        CHECK(cert[k].escape_time <= t1);
        const double end = cert[k].escape_time;
        for (int j = 0; j <= 100; ++j) {
          const double s = t0 + (end - t0) * j / 100.0;
          REQUIRE(net.channel(k).propensity.evaluate(s, x) <= cert[k].bound);
        }
      }
    }
  }
}

TEST_CASE("local suprema of periodic rates") {
  RandomStream rng(4, StreamId{0, 0, role_tag("local")});
  const RateFunction rates[] = {RateFunction::sine(60.0, 15.0, 24.0, 0.0),
                                RateFunction::sine(1.0, -0.7, 3.0, 0.4),
                                RateFunction::pulse(0.5448379495456018, 10.0, 0.3),
                                RateFunction::pulse(2.0, 0.0, 0.0)};
  for (const RateFunction& r : rates) {
    for (int trial = 0; trial < 500; ++trial) {
      const double a = rng.uniform() * 50.0;
      const double b = a + rng.uniform() * (trial % 2 == 0 ? 0.5 : 30.0);
      const double ls = r.local_sup(a, b);
      CHECK(ls <= r.sup(a, b));
      for (int j = 0; j <= 200; ++j) REQUIRE(r(a + (b - a) * j / 200.0) <= ls);
    }
  }
  CHECK(RateFunction::sine(60.0, 15.0, 24.0, 0.0).period() == 24.0);
  CHECK(RateFunction::pulse(1.0, 2.0, 0.0).period() == 1.0);
  CHECK(std::isinf(RateFunction::constant(1.0).period()));
}

TEST_CASE("propensities are non-negative and reject invalid rates") {
  const ReactionNetwork net = sir().build();
  const State x{10, 0, 3};
  for (std::size_t k = 0; k < net.channel_count(); ++k) {
    CHECK(net.channel(k).propensity.evaluate(0.3, x) >= 0.0);
  }
  const Propensity bad = Propensity::custom([](double, StateView) { return -1.0; },
                                            [](double, double t1, StateView) {
                                              return BoundCertificate{1.0, t1};
                                            });
  CHECK_THROWS_AS(bad.evaluate(0.0, x), ModelError);
}

TEST_CASE("network construction errors") {
  const Propensity p(RateFunction::constant(1.0), Kinetics::mass_action({}));
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {{"bad", {1, 0}, p}}), ModelError);
  const Propensity reads_b(RateFunction::constant(1.0), Kinetics::mass_action({{1, 1}}));
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {{"bad", {1}, reads_b}}), ModelError);
  const ReactionNetwork net({"A"}, {{"ok", {1}, p}});
  CHECK_THROWS_AS(net.check_state(State{-1}), ModelError);
  CHECK_THROWS_AS(net.check_state(State{1, 2}), ModelError);
}

TEST_CASE("apply_change") {
  State x{3, 0};
  apply_change(x, std::vector<Count>{-1, 2});
  CHECK(x == State{2, 2});
  CHECK_THROWS_AS(apply_change(x, std::vector<Count>{0, -3}), ModelError);
  CHECK(x == State{2, 2});
  CHECK_THROWS_AS(apply_change(x, std::vector<Count>{1}), ModelError);
}

TEST_CASE("subnetwork keeps species and selected channels") {
  const ReactionNetwork net = dimer().build();
  const std::vector<std::size_t> keep{0, 2};
  const ReactionNetwork sub = net.subnetwork(keep);
  CHECK(sub.species_count() == 3);
  REQUIRE(sub.channel_count() == 2);
  CHECK(sub.channel(1).name == "R3");
}
