// Acceptance suite: one PASS/FAIL line per criterion. Run everything, or a
// subset with --only 2,5. Exit status is nonzero if any selected criterion
// fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "issa/catalog.hpp"
#include "issa/config.hpp"
#include "issa/couplings.hpp"
#include "issa/estimators.hpp"
#include "issa/exact_sim.hpp"
#include "issa/experiment.hpp"
#include "issa/functional.hpp"
#include "issa/statistics.hpp"
#include "stat_helpers.hpp"

using namespace issa;
namespace ts = testing_stats;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 2718;

struct Verdict {
  bool pass = true;
  std::string summary;
};

// Detail lines are indented so the verdict lines stand out.
void detail(const std::string& text) { std::cout << "    " << text << '\n' << std::flush; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunControl control(std::uint64_t experiment) {
  RunControl run;
  run.seed = kSeed;
  run.experiment = experiment;
  run.workers = 0;
  return run;
}

// One-sided test of Var_a <= c * Var_b: passes only when H0 Var_a >= c Var_b
// is rejected at level alpha.
struct Ordering {
  bool pass;
  double z;
};
Ordering variance_le(const Moments& a, const Moments& b, double c, double alpha) {
  const double se = std::hypot(a.variance_standard_error(), c * b.variance_standard_error());
  const double z = se > 0.0 ? (c * b.variance() - a.variance()) / se : -INFINITY;
  return {z > ts::normal_quantile(1.0 - alpha), z};
}

// Final values of `species` for n exact paths of `net`.
std::vector<std::vector<double>> exact_finals(const ReactionNetwork& net, const State& x0, double T,
                                              ExactMethod method, std::uint64_t experiment,
                                              std::uint64_t n) {
  const std::size_t d = net.species_count();
  std::vector<std::size_t> all(d);
  for (std::size_t s = 0; s < d; ++s) all[s] = s;
  const Functional f = Functional::species_at(all, {T});
  std::vector<std::vector<double>> out(d);
  for (std::uint64_t i = 0; i < n; ++i) {
    FunctionalObserver obs(f, d);
    RandomStream s(kSeed, StreamId{experiment, i, role_tag("exact")});
    if (method == ExactMethod::kExtrande) {
      simulate_extrande(net, x0, T, s, obs);
    } else {
      simulate_hitting_time(net, x0, T, s, obs);
    }
    for (std::size_t k = 0; k < d; ++k) out[k].push_back(obs.values()[k]);
  }
  return out;
}

// 1. Birth process with rate 60 + 15 sin(2 pi t / 24): E[X(24)] = 1440.
Verdict analytic_mean() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::size_t> keep{0};
  const ReactionNetwork net = dimer().build().subnetwork(keep);
  Moments m;
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    RandomStream s(kSeed, StreamId{1, i, role_tag("exact")});
    m.add(static_cast<double>(simulate_extrande(net, State{0, 0, 0}, 24.0, s).final_state()[0]));
  }
  const double secs = seconds_since(t0);
  const double dev = std::fabs(m.mean() - 1440.0);
  const bool ok = dev < 3.0 * m.standard_error() && secs < 10.0;
  return {ok, fmt("mean %.3f, |dev| %.3f vs 3 SE %.3f, %.1f s (limit 10 s)", m.mean(), dev,
                  3.0 * m.standard_error(), secs)};
}

// 2. Extrande and the hitting-time baseline agree in law on the dimer model.
Verdict oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelFamily d = dimer();
  const ReactionNetwork net = d.build();
  const std::uint64_t n = 10'000;
  const auto ext = exact_finals(net, d.initial_state, 20.0, ExactMethod::kExtrande, 2, n);
  detail(fmt("extrande done after %.1f s", seconds_since(t0)));
  const auto hit = exact_finals(net, d.initial_state, 20.0, ExactMethod::kHittingTime, 3, n);
  const double secs = seconds_since(t0);
  const double crit = ts::ks_critical(0.001, n, n);
  bool ks_ok = true;
  std::string stats;
  for (std::size_t k = 0; k < ext.size(); ++k) {
    const double D = ts::ks_two_sample(ext[k], hit[k]);
    ks_ok = ks_ok && D < crit;
    stats += fmt(" %s D=%.4f", d.species[k].c_str(), D);
  }
  const bool time_ok = secs < 300.0;
  return {ks_ok && time_ok, fmt("KS%s (critical %.4f) %s; %.0f s (limit 300 s) %s", stats.c_str(),
                                crit, ks_ok ? "pass" : "FAIL", secs, time_ok ? "pass" : "FAIL")};
}

// 3. Each component of each coupling has the plain Extrande law.
Verdict coupling_marginals() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelFamily d = dimer();
  const double T = 20.0;
  const std::uint64_t n = 10'000;
  const ReactionNetwork net_x = d.build(d.with(d.parameters, "theta", 15.05));
  const ReactionNetwork net_z = d.build(d.with(d.parameters, "theta", 14.95));
  const auto plain_x = exact_finals(net_x, d.initial_state, T, ExactMethod::kExtrande, 30, n);
  const auto plain_z = exact_finals(net_z, d.initial_state, T, ExactMethod::kExtrande, 31, n);
  const double crit = ts::ks_critical(0.001, n, n);
  const Functional f = Functional::species_at({0, 1, 2}, {T});
  bool ks_ok = true;
  double worst = 0.0;
  std::uint64_t experiment = 32;
  for (Coupling c : {Coupling::kIndependent, Coupling::kCrn, Coupling::kThinning, Coupling::kStacked}) {
    std::vector<std::vector<double>> xs(3), zs(3);
    for (std::uint64_t i = 0; i < n; ++i) {
      FunctionalObserver ox(f, 3), oz(f, 3);
      couple(c, net_x, net_z, d.initial_state, d.initial_state, T, kSeed, experiment, i, ox, oz);
      for (std::size_t k = 0; k < 3; ++k) {
        xs[k].push_back(ox.values()[k]);
        zs[k].push_back(oz.values()[k]);
      }
    }
    ++experiment;
    std::string stats;
    for (std::size_t k = 0; k < 3; ++k) {
      const double dx = ts::ks_two_sample(xs[k], plain_x[k]);
      const double dz = ts::ks_two_sample(zs[k], plain_z[k]);
      ks_ok = ks_ok && dx < crit && dz < crit;
      worst = std::max({worst, dx, dz});
      stats += fmt(" %s %.4f/%.4f", d.species[k].c_str(), dx, dz);
    }
    detail(fmt("%-11s KS X/Z:%s (%.0f s)", std::string(to_string(c)).c_str(), stats.c_str(),
               seconds_since(t0)));
  }
  const double secs = seconds_since(t0);
  const bool time_ok = secs < 900.0;
  return {ks_ok && time_ok, fmt("24 KS tests, worst D=%.4f (critical %.4f) %s; %.0f s (limit 900 s) %s",
                                worst, crit, ks_ok ? "pass" : "FAIL", secs,
                                time_ok ? "pass" : "FAIL")};
}

// 4. Simultaneous stacked jumps always share the channel.
Verdict stacked_same_channel() {
  const ModelFamily d = dimer();
  const ReactionNetwork net_x = d.build(d.with(d.parameters, "theta", 15.05));
  const ReactionNetwork net_z = d.build(d.with(d.parameters, "theta", 14.95));
  std::uint64_t both = 0, violations = 0, pairs = 0;
  while (both < 100'000) {
    const CoupledPair p = couple_paths(Coupling::kStacked, net_x, net_z, d.initial_state,
                                       d.initial_state, 20.0, kSeed, 4, pairs++);
    for (const SharedEvent& e : p.shared_event_log) {
      if (e.channel_x == kNoChannel || e.channel_z == kNoChannel) continue;
      ++both;
      if (e.channel_x != e.channel_z) ++violations;
    }
  }
  return {violations == 0, fmt("%llu simultaneous events over %llu pairs, %llu violations",
                               static_cast<unsigned long long>(both),
                               static_cast<unsigned long long>(pairs),
                               static_cast<unsigned long long>(violations))};
}

std::vector<Moments> coupled_moments(const ModelFamily& m, const std::string& parameter, double h,
                                     Coupling c, const Functional& f, std::uint64_t n,
                                     std::uint64_t experiment, double T = 0.0) {
  SensitivityJob job;
  job.model = &m;
  job.parameter = parameter;
  job.h = h;
  job.coupling = c;
  job.functional = f;
  job.n = n;
  job.T = T;
  return sensitivity_moments(job, control(experiment));
}

// 5. Variance ordering of the couplings at t = 20.
Verdict variance_ordering() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelFamily d = dimer();
  const Functional f = Functional::species_at({0, 2}, {20.0});
  struct Perturbation {
    const char* parameter;
    double h;
  };
  bool ok = true;
  int failed = 0;
  std::uint64_t experiment = 50;
  for (const Perturbation& p : {Perturbation{"theta", 0.1}, Perturbation{"c3", 0.05}}) {
    std::vector<std::vector<Moments>> v;
    for (Coupling c : {Coupling::kIndependent, Coupling::kCrn, Coupling::kThinning, Coupling::kStacked}) {
      v.push_back(coupled_moments(d, p.parameter, p.h, c, f, 10'000, experiment++));
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const Moments &ind = v[0][k], &crn = v[1][k], &thin = v[2][k], &stk = v[3][k];
      const Ordering a = variance_le(stk, thin, 1.0, 0.01);
      const Ordering b = variance_le(crn, ind, 1.0, 0.01);
      const Ordering c = variance_le(stk, ind, 0.25, 0.01);
      detail(fmt("%s h=%g %s: var ind %.4g crn %.4g thin %.4g stk %.4g | z stk<=thin %.2f, "
                 "crn<=ind %.2f, stk<=ind/4 %.2f",
                 p.parameter, p.h, k == 0 ? "M(20)" : "D(20)", ind.variance(), crn.variance(),
                 thin.variance(), stk.variance(), a.z, b.z, c.z));
      for (bool r : {a.pass, b.pass, c.pass}) {
        ok = ok && r;
        failed += r ? 0 : 1;
      }
    }
  }
  return {ok, fmt("12 one-sided tests at alpha 0.01 (z > %.3f), %d failed; %.0f s",
                  ts::normal_quantile(0.99), failed, seconds_since(t0))};
}

// 6. Long horizon: crn decouples, stacked stays coupled.
Verdict long_horizon() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelFamily d = dimer();
  std::vector<double> times;
  for (int t = 1; t <= 200; ++t) times.push_back(t);
  const Functional f = Functional::species_at({0, 2}, times);
  const std::uint64_t n = 5'000;
  const auto ind = coupled_moments(d, "theta", 0.1, Coupling::kIndependent, f, n, 60, 200.0);
  detail(fmt("independent done after %.0f s", seconds_since(t0)));
  const auto crn = coupled_moments(d, "theta", 0.1, Coupling::kCrn, f, n, 61, 200.0);
  detail(fmt("crn done after %.0f s", seconds_since(t0)));
  const auto stk = coupled_moments(d, "theta", 0.1, Coupling::kStacked, f, n, 62, 200.0);
  bool ok = true;
  std::string summary;
  // Outputs are species-major: species k at times[j] is k * times.size() + j.
  for (std::size_t k = 0; k < 2; ++k) {
    double crn_sum = 0.0, stk_max = 0.0;
    int crn_count = 0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      const std::size_t o = k * times.size() + j;
      const double vi = ind[o].variance();
      const double r_stk = vi > 0.0 ? stk[o].variance() / vi : INFINITY;
      stk_max = std::max(stk_max, r_stk);
      if (times[j] >= 150.0) {
        crn_sum += crn[o].variance() / vi;
        ++crn_count;
      }
    }
    const double crn_avg = crn_sum / crn_count;
    const bool pass = crn_avg >= 0.8 && crn_avg <= 1.2 && stk_max < 0.5;
    ok = ok && pass;
    summary += fmt("%s%s: crn/ind avg over [150,200] %.3f, max stk/ind %.3f", k ? "; " : "",
                   k == 0 ? "M" : "D", crn_avg, stk_max);
  }
  return {ok, summary + fmt("; %.0f s", seconds_since(t0))};
}

MlmcJob mmp_mlmc(const ModelFamily& m, std::size_t species) {
  MlmcJob job;
  job.model = &m;
  job.functional = Functional::species_at(species, 2.0);
  job.config.M = 4;
  job.config.ell0 = 2;
  job.config.L = 3;
  job.config.T = 2.0;
  job.config.step_scale = 1.0;
  job.config.target_sd = 0.1;
  return job;
}

// 7. MLMC on the Markov-modulated model reproduces the published means.
Verdict mlmc_values() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelFamily m = mmp();
  const double published[] = {335.5, 768.2, 231.9, 432.5};
  bool ok = true;
  std::string summary;
  for (std::size_t k = 0; k < 4; ++k) {
    const EstimatorReport r = estimate_mlmc(mmp_mlmc(m, k), control(70 + k));
    const QuantityReport& total = r.rows.back();
    const double dev = std::fabs(total.estimate - published[k]);
    const bool pass = dev <= 0.3 && r.converged;
    ok = ok && pass;
    detail(fmt("%s: %.3f (sd %.4f) vs %.1f, |dev| %.3f %s", total.quantity.c_str(), total.estimate,
               std::sqrt(total.variance), published[k], dev, pass ? "pass" : "FAIL"));
  }
  return {ok, fmt("4 species within 0.3 of the published values: %s; %.0f s", ok ? "yes" : "no",
                  seconds_since(t0))};
}

// 8. MLMC needs at most a tenth of the random variables of direct Extrande.
Verdict mlmc_cost() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelFamily m = mmp();
  bool ok = true;
  double worst = INFINITY;
  for (std::size_t k = 0; k < 4; ++k) {
    const EstimatorReport q = estimate_mlmc(mmp_mlmc(m, k), control(70 + k));
    DirectJob dj;
    dj.model = &m;
    dj.functional = Functional::species_at(k, 2.0);
    dj.T = 2.0;
    dj.target_sd = 0.1;
    const EstimatorReport d = estimate_direct(dj, control(80 + k));
    const double ratio = static_cast<double>(d.cost.total()) / static_cast<double>(q.cost.total());
    const bool pass = ratio >= 10.0 && d.converged && q.converged;
    ok = ok && pass;
    worst = std::min(worst, ratio);
    detail(fmt("%s: direct %.3g RVs (n %llu, %.3f), mlmc %.3g RVs (%.3f), ratio %.1f %s",
               q.rows.back().quantity.c_str(), static_cast<double>(d.cost.total()),
               static_cast<unsigned long long>(d.rows[0].n), d.rows[0].estimate,
               static_cast<double>(q.cost.total()), q.rows.back().estimate, ratio,
               pass ? "pass" : "FAIL"));
  }
  return {ok, fmt("smallest direct/mlmc RV ratio %.1f (need >= 10); %.0f s", worst, seconds_since(t0))};
}

// 9. Simulating R6 exactly inside the tau-leap levels pays off for E[D(20)].
Verdict mlmc6() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelFamily d = dimer();
  const double target = 0.02;
  MlmcJob job;
  job.model = &d;
  job.functional = Functional::species_at(2, 20.0);
  job.config.M = 4;
  job.config.ell0 = 1;
  job.config.L = 2;
  job.config.T = 20.0;
  job.config.step_scale = 1.0;
  job.config.target_sd = target;
  const EstimatorReport standard = estimate_mlmc(job, control(90));
  detail(fmt("standard mlmc done after %.0f s", seconds_since(t0)));
  job.config.exact_channels = {5};
  const EstimatorReport six = estimate_mlmc(job, control(91));
  detail(fmt("mlmc6 done after %.0f s", seconds_since(t0)));
  DirectJob dj;
  dj.model = &d;
  dj.functional = job.functional;
  dj.T = 20.0;
  dj.target_sd = target;
  const EstimatorReport direct = estimate_direct(dj, control(92));
  const double ref = direct.rows[0].estimate;
  const double ref_sd = direct.rows[0].half_width / kZ95;
  bool ok = standard.converged && six.converged && direct.converged;
  for (const EstimatorReport* r : {&standard, &six}) {
    const QuantityReport& t = r->rows.back();
    const double sd = std::hypot(std::sqrt(t.variance), ref_sd);
    const bool agree = std::fabs(t.estimate - ref) <= 3.0 * sd;
    ok = ok && agree;
    detail(fmt("%s: %.4f (sd %.4f), %.3g RVs, vs extrande %.4f (sd %.4f): %s",
               r == &six ? "mlmc6   " : "standard", t.estimate, std::sqrt(t.variance),
               static_cast<double>(r->cost.total()), ref, ref_sd, agree ? "agree" : "DISAGREE"));
  }
  const double ratio =
      static_cast<double>(standard.cost.total()) / static_cast<double>(six.cost.total());
  ok = ok && ratio >= 3.0;
  return {ok, fmt("standard/mlmc6 RV ratio %.2f (need >= 3); extrande %.4f with %.3g RVs; %.0f s",
                  ratio, ref, static_cast<double>(direct.cost.total()), seconds_since(t0))};
}

// 10. Stacked has the smallest difference-quotient variance for every SIR
// parameter.
Verdict sir_orderings() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelFamily s = sir();
  const Functional f = Functional::extinction(s.species_index("I"), 10.0);
  bool ok = true;
  std::uint64_t experiment = 100;
  for (const char* p : {"m", "gamma", "R0", "s", "phi"}) {
    const double value = s.parameters.at(p);
    // phi is zero by default; perturb it by the same 0.05 on an absolute scale.
    const double h = value != 0.0 ? 0.05 * value : 0.05;
    std::vector<Moments> v;
    for (Coupling c : {Coupling::kIndependent, Coupling::kCrn, Coupling::kThinning, Coupling::kStacked}) {
      v.push_back(coupled_moments(s, p, h, c, f, 2'000, experiment++)[0]);
    }
    std::string zs;
    bool pass = true;
    for (std::size_t b = 0; b < 3; ++b) {
      const Ordering o = variance_le(v[3], v[b], 1.0, 0.05);
      pass = pass && o.pass;
      zs += fmt(" %.2f", o.z);
    }
    ok = ok && pass;
    detail(fmt("%-5s h=%-7g var ind %.4g crn %.4g thin %.4g stk %.4g | z vs ind/crn/thin%s %s", p, h,
               v[0].variance(), v[1].variance(), v[2].variance(), v[3].variance(), zs.c_str(),
               pass ? "pass" : "FAIL"));
  }
  return {ok, fmt("15 one-sided tests at alpha 0.05 (z > %.3f); %.0f s", ts::normal_quantile(0.95),
                  seconds_since(t0))};
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 11. Reruns and worker counts give byte-identical CSV files.
Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "issa_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  struct Case {
    Command command;
    const char* yaml;
  };
  const Case cases[] = {
      {Command::kSimulate, "model: {name: dimer}\nT: 5\nn: 200\ngrid: {start: 0, stop: 5, step: 0.5}\n"},
      {Command::kSimulate, "model: {name: dimer}\nT: 1\nn: 50\nmethod: hitting-time\n"},
      {Command::kSimulate, "model: {name: mmp}\nn: 200\ngrid: [0.5, 1, 2]\n"},
      {Command::kCouple, "model: {name: dimer}\nT: 3\nn: 100\nperturb: {theta: 0.1}\ncoupling: independent\n"
                         "grid: [1, 2, 3]\n"},
      {Command::kSensitivity, "model: {name: dimer}\nT: 3\nn: 100\nperturb: {c3: 0.05}\ncoupling: crn\n"
                              "grid: [1, 2, 3]\n"},
      {Command::kSensitivity, "model: {name: dimer}\nT: 3\nn: 100\nperturb: {theta: 0.1}\n"
                              "coupling: thinning\ngrid: [1, 2, 3]\n"},
      {Command::kSensitivity, "model: {name: sir}\nn: 100\nperturb: {R0: 0.1}\ncoupling: stacked\n"
                              "functional: {extinction: I, before: 10}\ngrid: [5, 10]\n"},
      {Command::kMlmc, "model: {name: mmp}\nfunctional: {species: [S2]}\nmlmc: {target_sd: 1, step_scale: 1}\n"},
      {Command::kMlmc, "model: {name: dimer}\nfunctional: {species: [D], times: [2]}\nT: 2\n"
                       "mlmc: {target_sd: 0.05, ell0: 1, L: 2, step_scale: 1, exact_channels: [6]}\n"},
  };
  int mismatches = 0, files = 0;
  int index = 0;
  for (const Case& c : cases) {
    std::vector<std::string> outputs;
    for (unsigned workers : {1u, 1u, 3u}) {
      ExperimentSpec spec = parse_config(c.yaml);
      spec.workers = workers;
      const std::string tag = (dir / ("c" + std::to_string(index))).string();
      spec.output.report = tag + "_report.csv";
      if (c.command != Command::kMlmc) {
        spec.output.paths = tag + "_paths.csv";
        if (!spec.grid.empty()) spec.output.curve = tag + "_curve.csv";
      }
      run_experiment(c.command, spec);
      std::string all = slurp(spec.output.report);
      if (!spec.output.paths.empty()) all += slurp(spec.output.paths);
      if (!spec.output.curve.empty()) all += slurp(spec.output.curve);
      outputs.push_back(all);
      fs::remove(spec.output.report);
      fs::remove(spec.output.paths);
      fs::remove(spec.output.curve);
    }
    ++files;
    if (outputs[0].size() < 100 || outputs[0] != outputs[1] || outputs[0] != outputs[2]) {
      ++mismatches;
      detail(fmt("%s case %d differs", std::string(to_string(c.command)).c_str(), index));
    }
    ++index;
  }
  fs::remove_all(dir);
  return {mismatches == 0, fmt("%d experiments rerun with 1, 1 and 3 workers, %d mismatches", files,
                               mismatches)};
}

double i0_series(double z) {
  const double q = 0.25 * z * z;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// 12. Special function, root solver and variate generators.
Verdict unit_oracles() {
  bool ok = true;
  double worst_i0 = 0.0;
  for (double z = -50.0; z <= 50.0; z += 0.0625) {
    worst_i0 = std::max(worst_i0, std::fabs(bessel_i0(z) - i0_series(z)) / i0_series(z));
  }
  ok = ok && worst_i0 < 1e-12;
  detail(fmt("bessel_i0 max relative error vs series on [-50, 50]: %.2e", worst_i0));

  double worst_hit = 0.0;
  HittingTimeOptions opt;
  for (double E : {1e-6, 0.01, 0.5, 1.0, 3.7, 25.0, 400.0}) {
    for (double c : {0.001, 1.0, 75.0}) {
      worst_hit = std::max(worst_hit,
                           std::fabs(solve_hitting_time([c](double) { return c; }, 2.5, 1e12, E, opt) - E / c));
    }
    worst_hit = std::max(worst_hit, std::fabs(solve_hitting_time([](double t) { return t; }, 0.0, 1e12,
                                                                 E, opt) - std::sqrt(2.0 * E)));
  }
  ok = ok && worst_hit < 1e-8;
  detail(fmt("hitting-time max abs error vs E/c and sqrt(2E): %.2e", worst_hit));

  const int n = 100'000;
  RandomStream s(kSeed, StreamId{120, 0, role_tag("oracle")});
  std::vector<double> e(n), u(n);
  for (int i = 0; i < n; ++i) e[i] = s.exponential();
  for (int i = 0; i < n; ++i) u[i] = s.uniform();
  const double crit = ts::ks_critical(0.001, n);
  const double de = ts::ks_statistic(e, [](double x) { return 1.0 - std::exp(-x); });
  const double du = ts::ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  ok = ok && de < crit && du < crit;
  detail(fmt("KS exponential D=%.5f, uniform D=%.5f (critical %.5f)", de, du, crit));

  for (double mean : {4.0, 37.5}) {
    const int hi = static_cast<int>(mean + 6.0 * std::sqrt(mean));
    std::vector<long long> counts(n);
    for (int i = 0; i < n; ++i) counts[i] = s.poisson(mean);
    const auto obs = ts::bin_counts(counts, hi);
    const auto exp = ts::poisson_expected(mean, hi, n);
    // Pool bins with expected counts below 5 into their neighbours.
    std::vector<double> o, x;
    double po = 0.0, px = 0.0;
    for (std::size_t b = 0; b < obs.size(); ++b) {
      po += obs[b];
      px += exp[b];
      if (px >= 5.0) {
        o.push_back(po);
        x.push_back(px);
        po = px = 0.0;
      }
    }
    if (px > 0.0) {
      o.back() += po;
      x.back() += px;
    }
    const double chi = ts::chi_square(o, x);
    const double critical = ts::chi_square_critical(0.001, static_cast<double>(o.size() - 1));
    ok = ok && chi < critical;
    detail(fmt("chi-square Poisson(%g): %.2f on %zu bins (critical %.2f)", mean, chi, o.size(), critical));
  }
  return {ok, ok ? "all oracles hold" : "an oracle failed"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "analytic mean", analytic_mean},
      {2, "oracle equivalence", oracle_equivalence},
      {3, "coupling marginals", coupling_marginals},
      {4, "stacked same channel", stacked_same_channel},
      {5, "variance ordering", variance_ordering},
      {6, "long-horizon decoupling", long_horizon},
      {7, "mlmc values", mlmc_values},
      {8, "mlmc cost", mlmc_cost},
      {9, "mlmc6 advantage", mlmc6},
      {10, "sir orderings", sir_orderings},
      {11, "determinism", determinism},
      {12, "unit oracles", unit_oracles},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string item; std::getline(list, item, ',');) only.insert(std::stoi(item));
    } else {
      std::cerr << "usage: " << argv[0] << " [--only N[,M...]]\n";
      return 2;
    }
  }
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    std::cout << "criterion " << c.id << " (" << c.name << ") running\n" << std::flush;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << ": "
              << v.summary << '\n'
              << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
