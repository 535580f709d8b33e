#include "issa/tau_leap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "channel_rates.hpp"

namespace issa {
namespace {

std::vector<bool> exact_mask(const ReactionNetwork& net,
                             std::span<const std::size_t> exact_channels) {
  std::vector<bool> mask(net.channel_count(), false);
  for (std::size_t k : exact_channels) {
    if (k >= net.channel_count()) {
      throw std::invalid_argument("exact channel " + std::to_string(k + 1) +
                                  " is out of range");
    }
    mask[k] = true;
  }
  return mask;
}

double grid_time(std::size_t n, std::size_t N, double h, double T) {
  return n == N ? T : static_cast<double>(n) * h;
}

// Clips negative coordinates to zero; returns how many were clipped.
std::uint64_t clip(std::span<Count> x) {
  std::uint64_t n = 0;
  for (Count& v : x) {
    if (v < 0) {
      v = 0;
      ++n;
    }
  }
  return n;
}

// Exact firings of the masked channels of one process over [t0, t1).
void exact_segment(detail::ChannelRates& rates, const std::vector<std::size_t>& exact, double t0, double t1, State& x,
                   RandomStream& s, PathObserver& obs, TauStats& stats) {
  double t = t0;
  while (true) {
    const double escape = rates.certify(t, t1, x);
    double bound = 0.0;
    for (std::size_t k : exact) bound += rates.bound(k);
    if (!(bound > 0.0)) {
      if (escape >= t1) return;
      t = escape;
      continue;
    }
    const double dt = s.exponential() / bound;
    if (t + dt > escape) {
      if (escape >= t1) return;
      t = escape;
      continue;
    }
    t += dt;
    const double u = s.uniform() * bound;
    double cum = 0.0;
    for (std::size_t k : exact) {
      cum += rates.checked_value(k, t, x);
      if (u < cum) {
        rates.fire(k, x);
        ++stats.exact_jumps;
        obs.on_jump(t, static_cast<std::uint32_t>(k), x);
        break;
      }
    }
  }
}

// Euler channels that change a species read by an exact channel. Their
// jumps happen at Poisson event times inside a step, so the exact channels
// see the live state; the remaining Euler channels are applied at the step
// end, which leaves the law at grid times unchanged.
std::vector<bool> timed_mask(const detail::ChannelRates& rates, const std::vector<bool>& exact) {
  std::vector<bool> timed(exact.size(), false);
  for (std::size_t k = 0; k < exact.size(); ++k) {
    if (exact[k]) continue;
    for (std::size_t j : rates.affected(k)) timed[k] = timed[k] || exact[j];
  }
  return timed;
}

struct TimedJump {
  double time;
  std::size_t channel;
  bool fine;    // applies to the (fine) tau-leap process
  bool coarse;  // applies to the coarse process of a level pair
};

// Appends n jumps of channel k at uniform times in [t0, t0 + dt).
void add_jumps(std::vector<TimedJump>& jumps, std::int64_t n, std::size_t k, double t0,
               double dt, bool fine, bool coarse, RandomStream& s) {
  for (std::int64_t i = 0; i < n; ++i) jumps.push_back({t0 + dt * s.uniform(), k, fine, coarse});
}

void sort_jumps(std::vector<TimedJump>& jumps) {
  std::sort(jumps.begin(), jumps.end(), [](const TimedJump& a, const TimedJump& b) {
    return a.time < b.time || (a.time == b.time && a.channel < b.channel);
  });
}

std::vector<std::size_t> mask_indices(const std::vector<bool>& mask, bool value) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k] == value) out.push_back(k);
  }
  return out;
}

}  // namespace

std::size_t step_count(double T, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("horizon must be > 0");
  const double ratio = T / h;
  const double n = std::round(ratio);
  if (n < 1.0 || std::fabs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("step size must divide the horizon");
  }
  return static_cast<std::size_t>(n);
}

TauStats simulate_tau_leap(const ReactionNetwork& net, StateView x0, double T, double h,
                           RandomStream& stream, PathObserver& observer,
                           std::span<const std::size_t> exact_channels) {
  net.check_state(x0);
  const std::size_t N = step_count(T, h);
  const std::vector<bool> mask = exact_mask(net, exact_channels);
  const std::vector<std::size_t> euler = mask_indices(mask, false);
  const std::vector<std::size_t> exact = mask_indices(mask, true);
  const DrawCounter before = stream.draws();
  detail::ChannelRates rates(net);
  const std::vector<bool> timed = timed_mask(rates, mask);
  State x(x0.begin(), x0.end());
  State pending(x.size(), 0);
  rates.refresh(x);
  std::vector<double> frozen(net.channel_count(), 0.0);
  std::vector<TimedJump> jumps;

  TauStats stats;
  observer.on_start(0.0, x);
  for (std::size_t n = 0; n < N && !observer.finished(); ++n) {
    const double t0 = grid_time(n, N, h, T);
    const double t1 = grid_time(n + 1, N, h, T);
    const double dt = t1 - t0;
    for (std::size_t k : euler) frozen[k] = rates.value(k, t0, x);
    std::fill(pending.begin(), pending.end(), 0);
    jumps.clear();
    bool moved = false;
    for (std::size_t k : euler) {
      const std::int64_t c = stream.poisson(frozen[k] * dt);
      if (c == 0) continue;
      if (timed[k]) {
        add_jumps(jumps, c, k, t0, dt, true, false, stream);
      } else {
        rates.accumulate(k, c, pending);
        moved = true;
      }
    }
    if (!exact.empty()) {
      sort_jumps(jumps);
      double t = t0;
      for (const TimedJump& j : jumps) {
        exact_segment(rates, exact, t, j.time, x, stream, observer, stats);
        stats.clipped += rates.apply_clipped(j.channel, x);
        observer.on_jump(j.time, static_cast<std::uint32_t>(j.channel), x);
        t = j.time;
      }
      exact_segment(rates, exact, t, t1, x, stream, observer, stats);
    }
    ++stats.steps;
    if (moved) {
      for (std::size_t s = 0; s < x.size(); ++s) x[s] += pending[s];
      stats.clipped += clip(x);
      rates.refresh(x);
      observer.on_jump(t1, kLeapChannel, x);
    }
  }
  observer.on_end(T, x);
  stats.draws = stream.draws() - before;
  return stats;
}

TrajectoryPath simulate_tau_leap(const ReactionNetwork& net, StateView x0, double T,
                                 double h, RandomStream& stream,
                                 std::span<const std::size_t> exact_channels) {
  PathRecorder rec;
  simulate_tau_leap(net, x0, T, h, stream, rec, exact_channels);
  return rec.take();
}

LevelPairStats couple_tau_leap_pair(const ReactionNetwork& net, StateView x0, double T,
                                    double h_fine, int M, RandomStream& stream,
                                    PathObserver& fine, PathObserver& coarse,
                                    std::span<const std::size_t> exact_channels) {
  if (M < 2) throw std::invalid_argument("refinement factor M must be >= 2");
  net.check_state(x0);
  const double h_coarse = h_fine * M;
  const std::size_t Nc = step_count(T, h_coarse);
  const std::vector<bool> mask = exact_mask(net, exact_channels);
  const std::vector<std::size_t> euler = mask_indices(mask, false);
  const std::vector<std::size_t> exact = mask_indices(mask, true);
  const std::size_t K = net.channel_count();
  const DrawCounter before = stream.draws();

  detail::ChannelRates rf(net);
  detail::ChannelRates rc(net);
  const std::vector<bool> timed = timed_mask(rf, mask);
  State xf(x0.begin(), x0.end());
  State xc(x0.begin(), x0.end());
  State pending_f(x0.size(), 0);
  State pending_c(x0.size(), 0);
  rf.refresh(xf);
  rc.refresh(xc);
  std::vector<double> lam_f(K, 0.0);
  std::vector<double> lam_c(K, 0.0);
  std::vector<double> strip(K, 0.0);
  std::vector<TimedJump> jumps;

  LevelPairStats stats;

  // Exact channels: stacked thinning on the live states over [t, end).
  auto run_exact = [&](double t, double end) {
    while (true) {
      const double escape = std::min(rf.certify(t, end, xf), rc.certify(t, end, xc));
      double total = 0.0;
      for (std::size_t k : exact) {
        strip[k] = std::max(rf.bound(k), rc.bound(k));
        total += strip[k];
      }
      if (!(total > 0.0)) {
        if (escape >= end) return;
        t = escape;
        continue;
      }
      const double step = stream.exponential() / total;
      if (t + step > escape) {
        if (escape >= end) return;
        t = escape;
        continue;
      }
      t += step;
      const double u = stream.uniform() * total;
      double below = 0.0;
      for (std::size_t k : exact) {
        if (u < below + strip[k]) {
          const double offset = u - below;
          if (offset < rf.checked_value(k, t, xf)) {
            rf.fire(k, xf);
            ++stats.fine.exact_jumps;
            fine.on_jump(t, static_cast<std::uint32_t>(k), xf);
          }
          if (offset < rc.checked_value(k, t, xc)) {
            rc.fire(k, xc);
            ++stats.coarse.exact_jumps;
            coarse.on_jump(t, static_cast<std::uint32_t>(k), xc);
          }
          break;
        }
        below += strip[k];
      }
    }
  };

  fine.on_start(0.0, xf);
  coarse.on_start(0.0, xc);
  for (std::size_t j = 0; j < Nc; ++j) {
    const double T0 = grid_time(j, Nc, h_coarse, T);
    const double T1 = grid_time(j + 1, Nc, h_coarse, T);
    for (std::size_t k : euler) lam_c[k] = rc.value(k, T0, xc);
    std::fill(pending_c.begin(), pending_c.end(), 0);
    bool coarse_moved = false;
    for (int i = 0; i < M; ++i) {
      const double t0 = i == 0 ? T0 : T0 + i * h_fine;
      const double t1 = i == M - 1 ? T1 : T0 + (i + 1) * h_fine;
      const double dt = t1 - t0;
      for (std::size_t k : euler) lam_f[k] = rf.value(k, t0, xf);
      std::fill(pending_f.begin(), pending_f.end(), 0);
      jumps.clear();

      // Shared counts at rate min(lam_f, lam_c) plus the two excesses.
      bool fine_moved = false;
      for (std::size_t k : euler) {
        const double m = std::min(lam_f[k], lam_c[k]);
        const std::int64_t n1 = stream.poisson(m * dt);
        const std::int64_t n2 = stream.poisson((lam_f[k] - m) * dt);
        const std::int64_t n3 = stream.poisson((lam_c[k] - m) * dt);
        if (timed[k]) {
          add_jumps(jumps, n1, k, t0, dt, true, true, stream);
          add_jumps(jumps, n2, k, t0, dt, true, false, stream);
          add_jumps(jumps, n3, k, t0, dt, false, true, stream);
          continue;
        }
        if (n1 + n2 > 0) {
          rf.accumulate(k, n1 + n2, pending_f);
          fine_moved = true;
        }
        if (n1 + n3 > 0) {
          rc.accumulate(k, n1 + n3, pending_c);
          coarse_moved = true;
        }
      }

      if (!exact.empty()) {
        sort_jumps(jumps);
        double t = t0;
        for (const TimedJump& e : jumps) {
          run_exact(t, e.time);
          const auto k = static_cast<std::uint32_t>(e.channel);
          if (e.fine) {
            stats.fine.clipped += rf.apply_clipped(e.channel, xf);
            fine.on_jump(e.time, k, xf);
          }
          if (e.coarse) {
            stats.coarse.clipped += rc.apply_clipped(e.channel, xc);
            coarse.on_jump(e.time, k, xc);
          }
          t = e.time;
        }
        run_exact(t, t1);
      }

      ++stats.fine.steps;
      if (fine_moved) {
        for (std::size_t s = 0; s < xf.size(); ++s) xf[s] += pending_f[s];
        stats.fine.clipped += clip(xf);
        rf.refresh(xf);
        fine.on_jump(t1, kLeapChannel, xf);
      }
    }
    ++stats.coarse.steps;
    if (coarse_moved) {
      for (std::size_t s = 0; s < xc.size(); ++s) xc[s] += pending_c[s];
      stats.coarse.clipped += clip(xc);
      rc.refresh(xc);
      coarse.on_jump(T1, kLeapChannel, xc);
    }
  }
  fine.on_end(T, xf);
  coarse.on_end(T, xc);
  stats.draws = stream.draws() - before;
  return stats;
}

CoupledPair couple_tau_leap_pair(const ReactionNetwork& net, StateView x0, double T,
                                 double h_fine, int M, RandomStream& stream,
                                 std::span<const std::size_t> exact_channels) {
  PathRecorder rf;
  PathRecorder rc;
  couple_tau_leap_pair(net, x0, T, h_fine, M, stream, rf, rc, exact_channels);
  CoupledPair pair;
  pair.path_x = rf.take();
  pair.path_z = rc.take();
  return pair;
}

ExactTauStats couple_exact_tau(const ReactionNetwork& net, StateView x0, double T, double h,
                               RandomStream& stream, PathObserver& ox, PathObserver& oz,
                               std::span<const std::size_t> exact_channels,
                               std::vector<SharedEvent>* event_log) {
  net.check_state(x0);
  const std::size_t N = step_count(T, h);
  const std::vector<bool> mask = exact_mask(net, exact_channels);
  const std::size_t K = net.channel_count();
  const DrawCounter before = stream.draws();

  detail::ChannelRates rx(net);
  detail::ChannelRates rz(net);
  const std::vector<bool> timed = timed_mask(rz, mask);
  State x(x0.begin(), x0.end());
  State z(x0.begin(), x0.end());
  rx.refresh(x);
  rz.refresh(z);
  std::vector<double> frozen(K, 0.0);
  std::vector<std::int64_t> buffered(K, 0);
  std::vector<double> strip(K, 0.0);

  ExactTauStats stats;
  ox.on_start(0.0, x);
  oz.on_start(0.0, z);
  for (std::size_t n = 0; n < N; ++n) {
    const double t0 = grid_time(n, N, h, T);
    const double t1 = grid_time(n + 1, N, h, T);
    for (std::size_t k = 0; k < K; ++k) {
      if (!mask[k]) frozen[k] = rz.value(k, t0, z);
    }
    std::fill(buffered.begin(), buffered.end(), 0);
    double t = t0;
    while (true) {
      const double escape = std::min(rx.certify(t, t1, x), rz.certify(t, t1, z));
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        strip[k] = std::max(rx.bound(k), mask[k] ? rz.bound(k) : frozen[k]);
        total += strip[k];
      }
      if (!(total > 0.0)) {
        if (escape >= t1) break;
        t = escape;
        continue;
      }
      const double dt = stream.exponential() / total;
      if (t + dt > escape) {
        if (escape >= t1) break;
        t = escape;
        ++stats.x.escapes;
        continue;
      }
      t += dt;
      ++stats.x.candidates;
      const double u = stream.uniform() * total;
      std::size_t mu = K;
      double below = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        if (u < below + strip[k]) {
          mu = k;
          break;
        }
        below += strip[k];
      }
      if (mu == K) continue;
      const double offset = u - below;
      const bool fx = offset < rx.checked_value(mu, t, x);
      const bool fz = offset < (mask[mu] ? rz.checked_value(mu, t, z) : frozen[mu]);
      if (fx) {
        rx.fire(mu, x);
        ++stats.x.accepted;
        ox.on_jump(t, static_cast<std::uint32_t>(mu), x);
      } else {
        ++stats.x.phantom;
      }
      if (fz) {
        if (mask[mu]) {
          rz.fire(mu, z);
          ++stats.z.exact_jumps;
          oz.on_jump(t, static_cast<std::uint32_t>(mu), z);
        } else if (timed[mu]) {
          stats.z.clipped += rz.apply_clipped(mu, z);
          oz.on_jump(t, static_cast<std::uint32_t>(mu), z);
        } else {
          ++buffered[mu];
        }
      }
      if (fx && fz) ++stats.both_fired;
      if (event_log != nullptr && (fx || fz)) {
        event_log->push_back({t, fx ? static_cast<std::int32_t>(mu) : kNoChannel,
                              fz ? static_cast<std::int32_t>(mu) : kNoChannel});
      }
    }
    bool moved = false;
    for (std::size_t k = 0; k < K; ++k) {
      if (buffered[k] > 0) {
        rz.accumulate(k, buffered[k], z);
        moved = true;
      }
    }
    ++stats.z.steps;
    if (moved) {
      stats.z.clipped += clip(z);
      rz.refresh(z);
      oz.on_jump(t1, kLeapChannel, z);
    }
  }
  ox.on_end(T, x);
  oz.on_end(T, z);
  stats.draws = stream.draws() - before;
  stats.x.draws = stats.draws;
  return stats;
}

CoupledPair couple_exact_tau(const ReactionNetwork& net, StateView x0, double T, double h,
                             RandomStream& stream,
                             std::span<const std::size_t> exact_channels) {
  PathRecorder rx;
  PathRecorder rz;
  CoupledPair pair;
  pair.strategy = Coupling::kStacked;
  couple_exact_tau(net, x0, T, h, stream, rx, rz, exact_channels, &pair.shared_event_log);
  pair.path_x = rx.take();
  pair.path_z = rz.take();
  return pair;
}

}  // namespace issa
