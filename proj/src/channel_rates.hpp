#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "issa/errors.hpp"
#include "issa/network.hpp"

namespace issa::detail {

// Periodic rates are certified on fixed cells of this fraction of their
// period; shorter cells give tighter bounds but more escapes.
inline constexpr double kCellsPerPeriod = 16.0;

// Per-process propensity cache. State factors are recomputed only for the
// channels a jump can affect; time-varying rates are evaluated on demand.
class ChannelRates {
 public:
  explicit ChannelRates(const ReactionNetwork& net) : net_(&net) {
    const std::size_t K = net.channel_count();
    const std::size_t d = net.species_count();
    info_.resize(K);
    factor_.assign(K, 0.0);
    bound_.assign(K, 0.0);
    changes_.resize(K);
    std::vector<std::vector<bool>> reads(K, std::vector<bool>(d, false));
    for (std::size_t k = 0; k < K; ++k) {
      const Propensity& p = net.channel(k).propensity;
      Info& in = info_[k];
      in.separable = p.separable();
      if (in.separable) {
        in.time_varying = p.rate().time_varying();
        in.sup = p.rate().sup(0.0, std::numeric_limits<double>::infinity());
        in.periodic = std::isfinite(p.rate().period());
        if (in.periodic) cell_ = std::min(cell_, p.rate().period() / kCellsPerPeriod);
        for (const Reactant& r : p.kinetics().reactants()) reads[k][r.species] = true;
        for (std::size_t s : p.kinetics().population_species()) reads[k][s] = true;
      } else {
        in.time_varying = true;
        std::fill(reads[k].begin(), reads[k].end(), true);
      }
      const auto& zeta = net.channel(k).change;
      for (std::size_t s = 0; s < d; ++s) {
        if (zeta[s] != 0) changes_[k].push_back({s, zeta[s]});
      }
    }
    affected_.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t j = 0; j < K; ++j) {
        for (const Delta& c : changes_[k]) {
          if (reads[j][c.species]) {
            affected_[k].push_back(j);
            break;
          }
        }
      }
    }
  }

  std::size_t size() const { return info_.size(); }
  const ReactionNetwork& network() const { return *net_; }

  void refresh(StateView x) {
    for (std::size_t k = 0; k < info_.size(); ++k) update(k, x);
  }

  // Applies channel k's change to x and refreshes dependent factors.
  void fire(std::size_t k, std::span<Count> x) {
    for (const Delta& c : changes_[k]) {
      const Count next = x[c.species] + c.delta;
      if (next < 0) {
        throw ModelError("channel " + std::to_string(k + 1) + " drove species " +
                         net_->species()[c.species] + " negative");
      }
      x[c.species] = next;
    }
    for (std::size_t j : affected_[k]) update(j, x);
  }

  // Applies channel k's change, clipping negative counts to zero, and
  // refreshes dependent factors. Returns the number of clipped coordinates.
  std::uint64_t apply_clipped(std::size_t k, std::span<Count> x) {
    std::uint64_t clipped = 0;
    for (const Delta& c : changes_[k]) {
      x[c.species] += c.delta;
      if (x[c.species] < 0) {
        x[c.species] = 0;
        ++clipped;
      }
    }
    for (std::size_t j : affected_[k]) update(j, x);
    return clipped;
  }

  // Channels whose propensity reads a species that channel k changes.
  const std::vector<std::size_t>& affected(std::size_t k) const { return affected_[k]; }

  // Applies the change n times (n >= 0) without refreshing and without the
  // negativity check; the caller clips and refreshes.
  void accumulate(std::size_t k, std::int64_t n, std::span<Count> x) const {
    for (const Delta& c : changes_[k]) x[c.species] += c.delta * n;
  }

  double value(std::size_t k, double t, StateView x) const {
    const Info& in = info_[k];
    if (!in.time_varying) return in.sup * factor_[k];
    if (in.separable) return net_->channel(k).propensity.rate()(t) * factor_[k];
    return net_->channel(k).propensity.evaluate(t, x);
  }

  double factor(std::size_t k) const { return factor_[k]; }
  bool time_varying(std::size_t k) const { return info_[k].time_varying; }

  // Per-channel certificates on [t0, t1]; returns the common escape time.
  // Periodic rates use their supremum over the fixed cell containing t0, so
  // the escape time is at most the end of that cell.
  double certify(double t0, double t1, StateView x) {
    double escape = t1;
    if (std::isfinite(cell_)) escape = std::min(escape, enter_cell(t0));
    for (std::size_t k = 0; k < info_.size(); ++k) {
      const Info& in = info_[k];
      if (in.periodic) {
        bound_[k] = cell_sup_[k] * factor_[k];
      } else if (in.separable) {
        bound_[k] = in.sup * factor_[k];
      } else {
        const BoundCertificate c = net_->channel(k).propensity.bound(t0, t1, x);
        bound_[k] = c.bound;
        escape = std::min(escape, c.escape_time);
      }
    }
    return escape;
  }

  double bound(std::size_t k) const { return bound_[k]; }
  const std::vector<double>& bounds() const { return bound_; }

  double total_bound() const {
    double s = 0.0;
    for (double b : bound_) s += b;
    return s;
  }

  double total(double t, StateView x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < info_.size(); ++k) s += value(k, t, x);
    return s;
  }

  // Value checked against the current certificate.
  double checked_value(std::size_t k, double t, StateView x) const {
    const double v = value(k, t, x);
    if (v > bound_[k]) throw BoundViolation(k, t, v, bound_[k]);
    return v;
  }

 private:
  struct Info {
    bool separable = true;
    bool time_varying = false;
    bool periodic = false;
    double sup = 0.0;  // global supremum of the rate
  };
  struct Delta {
    std::size_t species;
    Count delta;
  };

  // Refreshes the cached cell suprema if t0 left the current cell; returns
  // the cell end.
  double enter_cell(double t0) {
    double index = std::floor(t0 / cell_);
    if ((index + 1.0) * cell_ <= t0) index += 1.0;
    if (index != cell_index_) {
      cell_index_ = index;
      const double a = index * cell_;
      const double b = (index + 1.0) * cell_;
      cell_sup_.resize(info_.size());
      for (std::size_t k = 0; k < info_.size(); ++k) {
        if (info_[k].periodic) cell_sup_[k] = net_->channel(k).propensity.rate().local_sup(a, b);
      }
    }
    return (cell_index_ + 1.0) * cell_;
  }

  void update(std::size_t k, StateView x) {
    if (info_[k].separable) factor_[k] = net_->channel(k).propensity.kinetics().factor(x);
  }

  const ReactionNetwork* net_;
  std::vector<Info> info_;
  std::vector<double> factor_;
  std::vector<double> bound_;
  std::vector<std::vector<Delta>> changes_;
  std::vector<std::vector<std::size_t>> affected_;
  double cell_ = std::numeric_limits<double>::infinity();
  double cell_index_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> cell_sup_;
};

// The certification window: the full remaining horizon when every channel has
// a global (separable) bound, otherwise a fixed fraction of the horizon.
inline double resolve_window(const ReactionNetwork& net, double T, double requested) {
  if (requested > 0.0) return requested;
  for (const ReactionChannel& ch : net.channels()) {
    if (!ch.propensity.separable()) return 0.1 * T;
  }
  return T;
}

}  // namespace issa::detail
