#include "issa/exact_sim.hpp"

#include <cmath>
#include <limits>

#include "channel_rates.hpp"

namespace issa {

SimStats simulate_extrande(const ReactionNetwork& net, StateView x0, double T,
                           RandomStream& stream, PathObserver& observer,
                           const ExtrandeOptions& options) {
  net.check_state(x0);
  if (!(T >= 0.0)) throw ModelError("horizon must be >= 0");
  const DrawCounter before = stream.draws();
  const double window = detail::resolve_window(net, T, options.window);
  detail::ChannelRates rates(net);
  State x(x0.begin(), x0.end());
  rates.refresh(x);
  const std::size_t K = net.channel_count();

  SimStats stats;
  double t = 0.0;
  observer.on_start(t, x);
  while (t < T && !observer.finished()) {
    const double escape = rates.certify(t, std::min(T, t + window), x);
    const double bound = rates.total_bound();
    if (!(bound > 0.0)) {
      // Nothing can fire before the certificate expires.
      if (escape >= T) break;
      t = escape;
      ++stats.escapes;
      continue;
    }
    const double dt = stream.exponential() / bound;
    if (t + dt > escape) {
      if (escape >= T) break;
      t = escape;
      ++stats.escapes;
      continue;
    }
    t += dt;
    ++stats.candidates;
    const double u = stream.uniform() * bound;
    double cum = 0.0;
    std::size_t mu = K;
    for (std::size_t k = 0; k < K; ++k) {
      cum += rates.checked_value(k, t, x);
      if (u < cum) {
        mu = k;
        break;
      }
    }
    if (mu == K) {
      ++stats.phantom;
      continue;
    }
    rates.fire(mu, x);
    ++stats.accepted;
    observer.on_jump(t, static_cast<std::uint32_t>(mu), x);
  }
  observer.on_end(T, x);
  stats.draws = stream.draws() - before;
  return stats;
}

TrajectoryPath simulate_extrande(const ReactionNetwork& net, StateView x0, double T,
                                 RandomStream& stream, const ExtrandeOptions& options) {
  PathRecorder rec;
  simulate_extrande(net, x0, T, stream, rec, options);
  return rec.take();
}

SimStats simulate_hitting_time(const ReactionNetwork& net, StateView x0, double T,
                               RandomStream& stream, PathObserver& observer,
                               const HittingTimeOptions& options) {
  net.check_state(x0);
  if (!(options.tol > 0.0)) throw ModelError("hitting-time tolerance must be > 0");
  const DrawCounter before = stream.draws();
  detail::ChannelRates rates(net);
  State x(x0.begin(), x0.end());
  rates.refresh(x);
  const std::size_t K = net.channel_count();

  // Constant channels are summed once per state; only time-varying channels
  // are evaluated inside the quadrature.
  std::vector<std::size_t> varying;
  for (std::size_t k = 0; k < K; ++k) {
    if (rates.time_varying(k)) varying.push_back(k);
  }
  double constant_part = 0.0;
  auto recompute_constant = [&] {
    constant_part = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (!rates.time_varying(k)) constant_part += rates.value(k, 0.0, x);
    }
  };
  auto lambda0 = [&](double s) {
    double v = constant_part;
    for (std::size_t k : varying) v += rates.value(k, s, x);
    return v;
  };
  recompute_constant();

  SimStats stats;
  double t = 0.0;
  observer.on_start(t, x);
  while (t < T && !observer.finished()) {
    const double e = stream.exponential();
    const double dt = solve_hitting_time(lambda0, t, T, e, options);
    if (!(t + dt <= T)) break;
    t += dt;
    ++stats.candidates;
    const double total = lambda0(t);
    if (!(total > 0.0)) {
      throw SimulationError("total propensity vanished at a hitting time", t, t);
    }
    const double u = stream.uniform() * total;
    double cum = 0.0;
    std::size_t mu = K;
    std::size_t last_positive = K;
    for (std::size_t k = 0; k < K; ++k) {
      const double v = rates.value(k, t, x);
      if (v > 0.0) last_positive = k;
      cum += v;
      if (u < cum) {
        mu = k;
        break;
      }
    }
    // Rounding can leave u just above the accumulated sum.
    if (mu == K) mu = last_positive;
    rates.fire(mu, x);
    recompute_constant();
    ++stats.accepted;
    observer.on_jump(t, static_cast<std::uint32_t>(mu), x);
  }
  observer.on_end(T, x);
  stats.draws = stream.draws() - before;
  return stats;
}

TrajectoryPath simulate_hitting_time(const ReactionNetwork& net, StateView x0, double T,
                                     RandomStream& stream,
                                     const HittingTimeOptions& options) {
  PathRecorder rec;
  simulate_hitting_time(net, x0, T, stream, rec, options);
  return rec.take();
}

}  // namespace issa
