#include "issa/estimators.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "issa/exact_sim.hpp"
#include "issa/parallel.hpp"
#include "issa/tau_leap.hpp"

namespace issa {
namespace {

using Clock = std::chrono::steady_clock;

// Draws sample i: fills `out` (one value per output) and adds to `cost`.
using SampleFn = std::function<void(std::uint64_t, std::vector<double>&, DrawCounter&)>;

struct Accumulator {
  std::vector<Moments> moments;
  DrawCounter cost;
  double wall = 0.0;

  explicit Accumulator(std::size_t outputs = 0) : moments(outputs) {}
  std::uint64_t n() const { return moments.empty() ? 0 : moments[0].count(); }
};

struct ChunkResult {
  std::vector<Moments> moments;
  DrawCounter cost;
};

// Adds samples [lo, hi) to `acc`, merging chunks in index order.
void extend(Accumulator& acc, std::uint64_t lo, std::uint64_t hi, const RunControl& run,
            const SampleFn& sample) {
  const auto start = Clock::now();
  const std::size_t outputs = acc.moments.size();
  auto chunks = run_chunks<ChunkResult>(
      lo, hi, run.chunk, resolve_workers(run.workers), [&](std::uint64_t a, std::uint64_t b) {
        ChunkResult r;
        r.moments.resize(outputs);
        std::vector<double> v(outputs);
        for (std::uint64_t i = a; i < b; ++i) {
          sample(i, v, r.cost);
          for (std::size_t j = 0; j < outputs; ++j) r.moments[j].add(v[j]);
        }
        return r;
      });
  for (const ChunkResult& c : chunks) {
    for (std::size_t j = 0; j < outputs; ++j) acc.moments[j].merge(c.moments[j]);
    acc.cost += c.cost;
  }
  acc.wall += std::chrono::duration<double>(Clock::now() - start).count();
}

QuantityReport plain_row(std::string name, const Moments& m, const DrawCounter& cost,
                         double wall) {
  QuantityReport q;
  q.quantity = std::move(name);
  q.estimate = m.mean();
  q.variance = m.variance();
  q.variance_se = m.variance_standard_error();
  q.half_width = kZ95 * m.standard_error();
  q.n = m.count();
  q.cost = cost;
  q.wall_seconds = wall;
  return q;
}

const Parameters& params_or_default(const ModelFamily& model, const Parameters& p) {
  return p.empty() ? model.parameters : p;
}

const State& initial_or_default(const ModelFamily& model, const State& x0) {
  return x0.empty() ? model.initial_state : x0;
}

double horizon_for(double T, const Functional& f) {
  const double t = T > 0.0 ? T : f.horizon();
  if (f.horizon() > t) throw std::invalid_argument("functional looks past the horizon");
  return t;
}

// A fixed network for models without an environment; otherwise one per
// sample.
class NetworkSource {
 public:
  NetworkSource(const ModelFamily& model, Parameters params)
      : model_(&model), params_(std::move(params)) {
    if (!model.environment) fixed_ = std::make_shared<ReactionNetwork>(model.build(params_));
  }

  std::shared_ptr<const ReactionNetwork> get(
      const std::shared_ptr<const EnvironmentPath>& env) const {
    if (fixed_) return fixed_;
    return std::make_shared<ReactionNetwork>(model_->build(params_, env));
  }

 private:
  const ModelFamily* model_;
  Parameters params_;
  std::shared_ptr<const ReactionNetwork> fixed_;
};

constexpr std::uint64_t kRoleEnv = role_tag("env");
constexpr std::uint64_t kRoleDirect = role_tag("direct");

}  // namespace

namespace {

// Networks and constants shared by every sample of a sensitivity run.
struct SensitivitySetup {
  const ModelFamily* model;
  NetworkSource plus;
  NetworkSource minus;
  State x0;
  double T;

  static SensitivitySetup make(const SensitivityJob& job) {
    if (job.model == nullptr) throw std::invalid_argument("sensitivity job needs a model");
    if (job.quotient ? !(job.h > 0.0) : !(job.h >= 0.0)) {
      throw std::invalid_argument("perturbation h must be > 0");
    }
    const ModelFamily& model = *job.model;
    const Parameters& base = params_or_default(model, job.parameters);
    Parameters p = base;
    Parameters m = base;
    if (!job.parameter.empty() || job.h > 0.0) {
      // with() rejects unknown names before the lookup.
      model.with(base, job.parameter, 0.0);
      const double value = base.at(job.parameter);
      p = model.with(base, job.parameter, value + 0.5 * job.h);
      m = model.with(base, job.parameter, value - 0.5 * job.h);
    }
    return SensitivitySetup{&model,
                            NetworkSource(model, std::move(p)),
                            NetworkSource(model, std::move(m)),
                            initial_or_default(model, job.initial),
                            horizon_for(job.T, job.functional)};
  }
};

}  // namespace

std::vector<Moments> sensitivity_moments(const SensitivityJob& job, const RunControl& run,
                                         DrawCounter* cost) {
  const SensitivitySetup setup = SensitivitySetup::make(job);
  const ModelFamily& model = *setup.model;
  const std::size_t d = model.species.size();

  Accumulator acc(job.functional.output_count());
  SampleFn sample = [&](std::uint64_t i, std::vector<double>& out, DrawCounter& c) {
    const auto env =
        model.sample_environment(setup.T, run.seed, run.experiment, i, kRoleEnv, &c);
    const auto np = setup.plus.get(env);
    const auto nm = setup.minus.get(env);
    FunctionalObserver op(job.functional, d);
    FunctionalObserver om(job.functional, d);
    const PairStats ps =
        couple(job.coupling, *np, *nm, setup.x0, setup.x0, setup.T, run.seed, run.experiment,
               i, op, om, CouplingOptions{job.window, nullptr});
    c += ps.draws;
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double diff = op.values()[j] - om.values()[j];
      out[j] = job.quotient ? diff / job.h : diff;
    }
  };
  extend(acc, 0, job.n, run, sample);
  if (cost != nullptr) *cost += acc.cost;
  return acc.moments;
}

CoupledPair sensitivity_pair(const SensitivityJob& job, const RunControl& run,
                             std::uint64_t sample) {
  const SensitivitySetup setup = SensitivitySetup::make(job);
  const auto env = setup.model->sample_environment(setup.T, run.seed, run.experiment, sample,
                                                   kRoleEnv, nullptr);
  return couple_paths(job.coupling, *setup.plus.get(env), *setup.minus.get(env), setup.x0,
                      setup.x0, setup.T, run.seed, run.experiment, sample, job.window);
}

EstimatorReport estimate_sensitivity(const SensitivityJob& job, const RunControl& run) {
  const auto start = Clock::now();
  DrawCounter cost;
  const std::vector<Moments> m = sensitivity_moments(job, run, &cost);
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  EstimatorReport rep;
  for (std::size_t j = 0; j < m.size(); ++j) {
    rep.rows.push_back(plain_row("d/d" + job.parameter + " " +
                                     job.functional.label(j, job.model->species),
                                 m[j], cost, wall));
  }
  rep.cost = cost;
  rep.wall_seconds = wall;
  return rep;
}

namespace {

// One direct sample; the environment and path streams depend only on
// (seed, experiment, sample).
void direct_sample(const DirectJob& job, const RunControl& run, const NetworkSource& source,
                   StateView x0, double T, std::uint64_t i, PathObserver& obs,
                   DrawCounter& cost) {
  const auto env =
      job.model->sample_environment(T, run.seed, run.experiment, i, kRoleEnv, &cost);
  const auto net = source.get(env);
  RandomStream s(run.seed, {run.experiment, i, kRoleDirect});
  if (job.method == ExactMethod::kExtrande) {
    cost += simulate_extrande(*net, x0, T, s, obs, ExtrandeOptions{job.window}).draws;
  } else {
    HittingTimeOptions ho;
    ho.tol = job.tol;
    cost += simulate_hitting_time(*net, x0, T, s, obs, ho).draws;
  }
}

}  // namespace

TrajectoryPath direct_path(const DirectJob& job, const RunControl& run, std::uint64_t sample) {
  if (job.model == nullptr) throw std::invalid_argument("direct job needs a model");
  const NetworkSource source(*job.model, params_or_default(*job.model, job.parameters));
  PathRecorder rec;
  DrawCounter cost;
  direct_sample(job, run, source, initial_or_default(*job.model, job.initial),
                horizon_for(job.T, job.functional), sample, rec, cost);
  return rec.take();
}

EstimatorReport estimate_direct(const DirectJob& job, const RunControl& run) {
  if (job.model == nullptr) throw std::invalid_argument("direct job needs a model");
  const ModelFamily& model = *job.model;
  const NetworkSource source(model, params_or_default(model, job.parameters));
  const State& x0 = initial_or_default(model, job.initial);
  const double T = horizon_for(job.T, job.functional);
  const std::size_t d = model.species.size();

  SampleFn sample = [&](std::uint64_t i, std::vector<double>& out, DrawCounter& c) {
    FunctionalObserver obs(job.functional, d);
    direct_sample(job, run, source, x0, T, i, obs, c);
    out = obs.values();
  };

  Accumulator acc(job.functional.output_count());
  EstimatorReport rep;
  if (job.target_sd > 0.0) {
    const double eps2 = job.target_sd * job.target_sd;
    std::uint64_t n = std::max<std::uint64_t>(job.pilot, 2);
    extend(acc, 0, n, run, sample);
    for (int round = 0; round < 50; ++round) {
      std::uint64_t need = n;
      for (const Moments& m : acc.moments) {
        need = std::max(need, static_cast<std::uint64_t>(std::ceil(m.variance() / eps2)));
      }
      if (need <= n) break;
      if (need > job.max_samples) {
        need = job.max_samples;
        rep.converged = false;
      }
      if (need <= n) break;
      extend(acc, n, need, run, sample);
      n = need;
    }
  } else {
    extend(acc, 0, job.n, run, sample);
  }
  for (std::size_t j = 0; j < acc.moments.size(); ++j) {
    rep.rows.push_back(plain_row(job.functional.label(j, model.species), acc.moments[j],
                                 acc.cost, acc.wall));
  }
  rep.cost = acc.cost;
  rep.wall_seconds = acc.wall;
  if (!rep.converged) rep.note = "sample budget reached before the target standard deviation";
  return rep;
}

double MlmcConfig::step(int level) const {
  const double scale = step_scale > 0.0 ? step_scale : T;
  return scale * std::pow(static_cast<double>(M), -level);
}

void MlmcConfig::validate() const {
  if (M < 2) throw std::invalid_argument("mlmc: M must be >= 2");
  if (ell0 < 0 || L < ell0) throw std::invalid_argument("mlmc: need 0 <= ell0 <= L");
  if (!(T > 0.0)) throw std::invalid_argument("mlmc: horizon must be > 0");
  if (!(target_sd > 0.0)) throw std::invalid_argument("mlmc: target_sd must be > 0");
  if (pilot < 2) throw std::invalid_argument("mlmc: pilot must be >= 2");
  for (int l = ell0; l <= L; ++l) step_count(T, step(l));
}

EstimatorReport estimate_mlmc(const MlmcJob& job, const RunControl& run) {
  if (job.model == nullptr) throw std::invalid_argument("mlmc job needs a model");
  if (job.functional.output_count() != 1) {
    throw std::invalid_argument("mlmc needs a scalar functional");
  }
  const MlmcConfig& cfg = job.config;
  cfg.validate();
  const ModelFamily& model = *job.model;
  const NetworkSource source(model, params_or_default(model, job.parameters));
  const State& x0 = initial_or_default(model, job.initial);
  const double T = cfg.T;
  horizon_for(T, job.functional);
  const std::size_t d = model.species.size();
  const std::span<const std::size_t> exact(cfg.exact_channels);

  struct Level {
    std::string name;
    SampleFn sample;
    Accumulator acc{1};
  };
  std::vector<Level> levels;

  {
    const double h = cfg.step(cfg.L);
    const std::uint64_t role = role_tag("mlmc/E");
    const std::uint64_t env_role = role_tag("mlmc/E/env");
    levels.push_back({"E", [&, h, role, env_role](std::uint64_t i, std::vector<double>& out,
                                                   DrawCounter& c) {
                        const auto env =
                            model.sample_environment(T, run.seed, run.experiment, i, env_role, &c);
                        const auto net = source.get(env);
                        RandomStream s(run.seed, {run.experiment, i, role});
                        FunctionalObserver ox(job.functional, d);
                        FunctionalObserver oz(job.functional, d);
                        c += couple_exact_tau(*net, x0, T, h, s, ox, oz, exact).draws;
                        out[0] = ox.values()[0] - oz.values()[0];
                      }});
  }
  for (int l = cfg.L; l > cfg.ell0; --l) {
    const double h = cfg.step(l);
    const std::string tag = "mlmc/" + std::to_string(l);
    const std::uint64_t role = role_tag(tag);
    const std::uint64_t env_role = role_tag(tag + "/env");
    levels.push_back({std::to_string(l), [&, h, role, env_role](std::uint64_t i,
                                                               std::vector<double>& out,
                                                               DrawCounter& c) {
                        const auto env =
                            model.sample_environment(T, run.seed, run.experiment, i, env_role, &c);
                        const auto net = source.get(env);
                        RandomStream s(run.seed, {run.experiment, i, role});
                        FunctionalObserver of(job.functional, d);
                        FunctionalObserver oc(job.functional, d);
                        c += couple_tau_leap_pair(*net, x0, T, h, cfg.M, s, of, oc, exact).draws;
                        out[0] = of.values()[0] - oc.values()[0];
                      }});
  }
  {
    const double h = cfg.step(cfg.ell0);
    const std::string tag = "mlmc/" + std::to_string(cfg.ell0);
    const std::uint64_t role = role_tag(tag);
    const std::uint64_t env_role = role_tag(tag + "/env");
    levels.push_back({std::to_string(cfg.ell0), [&, h, role, env_role](
                                                    std::uint64_t i, std::vector<double>& out,
                                                    DrawCounter& c) {
                        const auto env =
                            model.sample_environment(T, run.seed, run.experiment, i, env_role, &c);
                        const auto net = source.get(env);
                        RandomStream s(run.seed, {run.experiment, i, role});
                        FunctionalObserver o(job.functional, d);
                        c += simulate_tau_leap(*net, x0, T, h, s, o, exact).draws;
                        out[0] = o.values()[0];
                      }});
  }

  EstimatorReport rep;
  for (Level& lv : levels) extend(lv.acc, 0, cfg.pilot, run, lv.sample);

  const double eps2 = cfg.target_sd * cfg.target_sd;
  for (int round = 0; round < 100; ++round) {
    // Optimal allocation for the current variance and cost estimates.
    double sum_vc = 0.0;
    std::vector<double> v(levels.size());
    std::vector<double> c(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const Accumulator& a = levels[i].acc;
      v[i] = a.moments[0].variance();
      c[i] = std::max(1.0, static_cast<double>(a.cost.total()) / static_cast<double>(a.n()));
      sum_vc += std::sqrt(v[i] * c[i]);
    }
    bool grew = false;
    double est_var = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      Accumulator& a = levels[i].acc;
      std::uint64_t want = static_cast<std::uint64_t>(
          std::ceil(std::sqrt(v[i] / c[i]) * sum_vc / eps2));
      if (want > cfg.max_samples) {
        want = cfg.max_samples;
        rep.converged = false;
      }
      if (want > a.n()) {
        extend(a, a.n(), want, run, levels[i].sample);
        grew = true;
      }
      est_var += a.moments[0].variance() / static_cast<double>(a.n());
    }
    if (!grew && est_var <= eps2) break;
    if (!grew) {
      // Allocation already met but the variance estimate moved: add 10%.
      for (Level& lv : levels) {
        const std::uint64_t n = lv.acc.n();
        extend(lv.acc, n, std::min(cfg.max_samples, n + n / 10 + 1), run, lv.sample);
      }
    }
  }

  QuantityReport total;
  total.quantity = job.functional.label(0, model.species);
  double est_var = 0.0;
  for (Level& lv : levels) {
    const Moments& m = lv.acc.moments[0];
    rep.rows.push_back(plain_row("level " + lv.name, m, lv.acc.cost, lv.acc.wall));
    total.estimate += m.mean();
    est_var += m.variance() / static_cast<double>(m.count());
    total.n += m.count();
    total.cost += lv.acc.cost;
    total.wall_seconds += lv.acc.wall;
  }
  total.variance = est_var;
  total.half_width = kZ95 * std::sqrt(est_var);
  if (est_var > eps2) rep.converged = false;
  rep.rows.push_back(total);
  rep.cost = total.cost;
  rep.wall_seconds = total.wall_seconds;
  if (!rep.converged) rep.note = "sample budget reached before the target standard deviation";
  return rep;
}

}  // namespace issa
