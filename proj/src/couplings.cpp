#include "issa/couplings.hpp"

#include <stdexcept>
#include <string>

#include "channel_rates.hpp"

namespace issa {
namespace {

constexpr std::uint64_t kRoleX = role_tag("x");
constexpr std::uint64_t kRoleZ = role_tag("z");
constexpr std::uint64_t kRolePair = role_tag("pair");

void check_pair(const ReactionNetwork& net_x, const ReactionNetwork& net_z, StateView x0,
                StateView z0, double T) {
  if (net_x.species_count() != net_z.species_count() ||
      net_x.channel_count() != net_z.channel_count()) {
    throw ModelError("coupled networks must have the same species and channels");
  }
  for (std::size_t k = 0; k < net_x.channel_count(); ++k) {
    if (net_x.channel(k).change != net_z.channel(k).change) {
      throw ModelError("coupled networks must share reaction vectors (channel " +
                       std::to_string(k + 1) + " differs)");
    }
  }
  net_x.check_state(x0);
  net_z.check_state(z0);
  if (!(T >= 0.0)) throw ModelError("horizon must be >= 0");
}

// Index of the channel whose half-open cumulative interval contains u, or K
// for the phantom channel.
std::size_t classify(const detail::ChannelRates& rates, double u, double t, StateView x) {
  double cum = 0.0;
  const std::size_t K = rates.size();
  for (std::size_t k = 0; k < K; ++k) {
    cum += rates.checked_value(k, t, x);
    if (u < cum) return k;
  }
  return K;
}

struct PairState {
  PairState(const ReactionNetwork& nx, const ReactionNetwork& nz, StateView x0,
            StateView z0)
      : rx(nx), rz(nz), x(x0.begin(), x0.end()), z(z0.begin(), z0.end()) {
    rx.refresh(x);
    rz.refresh(z);
  }
  detail::ChannelRates rx;
  detail::ChannelRates rz;
  State x;
  State z;
};

void log_event(const CouplingOptions& options, double t, std::size_t mx, std::size_t mz,
               std::size_t K) {
  if (options.event_log == nullptr || (mx == K && mz == K)) return;
  options.event_log->push_back({t, mx == K ? kNoChannel : static_cast<std::int32_t>(mx),
                                mz == K ? kNoChannel : static_cast<std::int32_t>(mz)});
}

}  // namespace

std::string_view to_string(Coupling c) {
  switch (c) {
    case Coupling::kIndependent:
      return "independent";
    case Coupling::kCrn:
      return "crn";
    case Coupling::kThinning:
      return "thinning";
    case Coupling::kStacked:
      return "stacked";
  }
  return "unknown";
}

Coupling parse_coupling(std::string_view name) {
  if (name == "independent") return Coupling::kIndependent;
  if (name == "crn") return Coupling::kCrn;
  if (name == "thinning") return Coupling::kThinning;
  if (name == "stacked") return Coupling::kStacked;
  throw std::invalid_argument("unknown coupling '" + std::string(name) +
                              "' (expected independent, crn, thinning or stacked)");
}

PairStats couple_independent(const ReactionNetwork& net_x, const ReactionNetwork& net_z,
                             StateView x0, StateView z0, double T, RandomStream& sx,
                             RandomStream& sz, PathObserver& ox, PathObserver& oz,
                             const CouplingOptions& options) {
  if (sx.seed() == sz.seed() && sx.id() == sz.id()) {
    throw std::invalid_argument("independent coupling needs two distinct streams");
  }
  check_pair(net_x, net_z, x0, z0, T);
  const ExtrandeOptions eo{options.window};
  PairStats ps;
  ps.x = simulate_extrande(net_x, x0, T, sx, ox, eo);
  ps.z = simulate_extrande(net_z, z0, T, sz, oz, eo);
  ps.draws = ps.x.draws + ps.z.draws;
  return ps;
}

PairStats couple_crn(const ReactionNetwork& net_x, const ReactionNetwork& net_z,
                     StateView x0, StateView z0, double T, RandomStream& s,
                     PathObserver& ox, PathObserver& oz, const CouplingOptions& options) {
  check_pair(net_x, net_z, x0, z0, T);
  const ExtrandeOptions eo{options.window};
  RandomStream sx = s;
  RandomStream sz = s;
  PairStats ps;
  ps.x = simulate_extrande(net_x, x0, T, sx, ox, eo);
  ps.z = simulate_extrande(net_z, z0, T, sz, oz, eo);
  ps.draws = ps.x.draws + ps.z.draws;
  s = sx.draws().total() >= sz.draws().total() ? sx : sz;
  return ps;
}

PairStats couple_thinning(const ReactionNetwork& net_x, const ReactionNetwork& net_z,
                          StateView x0, StateView z0, double T, RandomStream& s,
                          PathObserver& ox, PathObserver& oz,
                          const CouplingOptions& options) {
  check_pair(net_x, net_z, x0, z0, T);
  const DrawCounter before = s.draws();
  const double window = std::min(detail::resolve_window(net_x, T, options.window),
                                 detail::resolve_window(net_z, T, options.window));
  PairState st(net_x, net_z, x0, z0);
  const std::size_t K = net_x.channel_count();
  PairStats ps;
  double t = 0.0;
  ox.on_start(t, st.x);
  oz.on_start(t, st.z);
  while (t < T && !(ox.finished() && oz.finished())) {
    const double t1 = std::min(T, t + window);
    const double escape = std::min(st.rx.certify(t, t1, st.x), st.rz.certify(t, t1, st.z));
    const double bound = std::max(st.rx.total_bound(), st.rz.total_bound());
    if (!(bound > 0.0)) {
      if (escape >= T) break;
      t = escape;
      continue;
    }
    const double dt = s.exponential() / bound;
    if (t + dt > escape) {
      if (escape >= T) break;
      t = escape;
      ++ps.x.escapes;
      ++ps.z.escapes;
      continue;
    }
    t += dt;
    ++ps.candidates;
    const double u = s.uniform() * bound;
    const std::size_t mx = classify(st.rx, u, t, st.x);
    const std::size_t mz = classify(st.rz, u, t, st.z);
    if (mx < K) {
      st.rx.fire(mx, st.x);
      ++ps.x.accepted;
      ox.on_jump(t, static_cast<std::uint32_t>(mx), st.x);
    } else {
      ++ps.x.phantom;
    }
    if (mz < K) {
      st.rz.fire(mz, st.z);
      ++ps.z.accepted;
      oz.on_jump(t, static_cast<std::uint32_t>(mz), st.z);
    } else {
      ++ps.z.phantom;
    }
    if (mx < K && mz < K) ++ps.both_fired;
    log_event(options, t, mx, mz, K);
  }
  ox.on_end(T, st.x);
  oz.on_end(T, st.z);
  ps.draws = s.draws() - before;
  ps.x.candidates = ps.z.candidates = ps.candidates;
  return ps;
}

PairStats couple_stacked(const ReactionNetwork& net_x, const ReactionNetwork& net_z,
                         StateView x0, StateView z0, double T, RandomStream& s,
                         PathObserver& ox, PathObserver& oz,
                         const CouplingOptions& options) {
  check_pair(net_x, net_z, x0, z0, T);
  const DrawCounter before = s.draws();
  const double window = std::min(detail::resolve_window(net_x, T, options.window),
                                 detail::resolve_window(net_z, T, options.window));
  PairState st(net_x, net_z, x0, z0);
  const std::size_t K = net_x.channel_count();
  std::vector<double> strip(K);
  PairStats ps;
  double t = 0.0;
  ox.on_start(t, st.x);
  oz.on_start(t, st.z);
  while (t < T && !(ox.finished() && oz.finished())) {
    const double t1 = std::min(T, t + window);
    const double escape = std::min(st.rx.certify(t, t1, st.x), st.rz.certify(t, t1, st.z));
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      strip[k] = std::max(st.rx.bound(k), st.rz.bound(k));
      total += strip[k];
    }
    if (!(total > 0.0)) {
      if (escape >= T) break;
      t = escape;
      continue;
    }
    const double dt = s.exponential() / total;
    if (t + dt > escape) {
      if (escape >= T) break;
      t = escape;
      ++ps.x.escapes;
      ++ps.z.escapes;
      continue;
    }
    t += dt;
    ++ps.candidates;
    const double u = s.uniform() * total;
    // Strip containing u; zero-height strips can never contain it.
    std::size_t mu = K;
    double below = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (u < below + strip[k]) {
        mu = k;
        break;
      }
      below += strip[k];
    }
    if (mu == K) continue;  // u rounded onto the top edge: a phantom for both
    const double offset = u - below;
    const bool fx = offset < st.rx.checked_value(mu, t, st.x);
    const bool fz = offset < st.rz.checked_value(mu, t, st.z);
    if (fx) {
      st.rx.fire(mu, st.x);
      ++ps.x.accepted;
      ox.on_jump(t, static_cast<std::uint32_t>(mu), st.x);
    } else {
      ++ps.x.phantom;
    }
    if (fz) {
      st.rz.fire(mu, st.z);
      ++ps.z.accepted;
      oz.on_jump(t, static_cast<std::uint32_t>(mu), st.z);
    } else {
      ++ps.z.phantom;
    }
    if (fx && fz) ++ps.both_fired;
    log_event(options, t, fx ? mu : K, fz ? mu : K, K);
  }
  ox.on_end(T, st.x);
  oz.on_end(T, st.z);
  ps.draws = s.draws() - before;
  ps.x.candidates = ps.z.candidates = ps.candidates;
  return ps;
}

PairStats couple(Coupling strategy, const ReactionNetwork& net_x,
                 const ReactionNetwork& net_z, StateView x0, StateView z0, double T,
                 std::uint64_t seed, std::uint64_t experiment, std::uint64_t sample,
                 PathObserver& ox, PathObserver& oz, const CouplingOptions& options) {
  if (strategy == Coupling::kIndependent) {
    RandomStream sx(seed, {experiment, sample, kRoleX});
    RandomStream sz(seed, {experiment, sample, kRoleZ});
    return couple_independent(net_x, net_z, x0, z0, T, sx, sz, ox, oz, options);
  }
  RandomStream s(seed, {experiment, sample, kRolePair});
  switch (strategy) {
    case Coupling::kCrn:
      return couple_crn(net_x, net_z, x0, z0, T, s, ox, oz, options);
    case Coupling::kThinning:
      return couple_thinning(net_x, net_z, x0, z0, T, s, ox, oz, options);
    default:
      return couple_stacked(net_x, net_z, x0, z0, T, s, ox, oz, options);
  }
}

CoupledPair couple_paths(Coupling strategy, const ReactionNetwork& net_x,
                         const ReactionNetwork& net_z, StateView x0, StateView z0,
                         double T, std::uint64_t seed, std::uint64_t experiment,
                         std::uint64_t sample, double window) {
  CoupledPair pair;
  pair.strategy = strategy;
  PathRecorder rx;
  PathRecorder rz;
  CouplingOptions options{window, nullptr};
  if (strategy == Coupling::kThinning || strategy == Coupling::kStacked) {
    options.event_log = &pair.shared_event_log;
  }
  couple(strategy, net_x, net_z, x0, z0, T, seed, experiment, sample, rx, rz, options);
  pair.path_x = rx.take();
  pair.path_z = rz.take();
  return pair;
}

}  // namespace issa
