#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "issa/network.hpp"

namespace issa {

/// Channel index recorded for an aggregate tau-leap update (many channels
/// firing at once at a step boundary).
inline constexpr std::uint32_t kLeapChannel = std::numeric_limits<std::uint32_t>::max();

/// Right-continuous piecewise-constant path. Channel indices are 0-based;
/// thinning rejections are never recorded.
class TrajectoryPath {
 public:
  TrajectoryPath() = default;
  TrajectoryPath(StateView initial, double t_end);

  void push(double t, std::uint32_t channel, StateView x);

  double t_end() const { return t_end_; }
  void set_t_end(double t) { t_end_ = t; }
  std::size_t species_count() const { return initial_.size(); }
  std::size_t jump_count() const { return times_.size(); }
  const State& initial_state() const { return initial_; }
  const std::vector<double>& jump_times() const { return times_; }
  const std::vector<std::uint32_t>& channel_indices() const { return channels_; }
  StateView state(std::size_t i) const {
    return {states_.data() + i * initial_.size(), initial_.size()};
  }
  /// X(t), right-continuous: includes every jump at time <= t.
  StateView state_at(double t) const;
  StateView final_state() const {
    return times_.empty() ? StateView(initial_) : state(times_.size() - 1);
  }

 private:
  double t_end_ = 0.0;
  State initial_;
  std::vector<double> times_;
  std::vector<std::uint32_t> channels_;
  std::vector<Count> states_;
};

/// Receives a path as it is generated, so long runs need not store it.
class PathObserver {
 public:
  virtual ~PathObserver() = default;
  virtual void on_start(double /*t*/, StateView /*x*/) {}
  virtual void on_jump(double /*t*/, std::uint32_t /*channel*/, StateView /*x*/) {}
  virtual void on_end(double /*t*/, StateView /*x*/) {}
  /// Simulators may stop early once this returns true (for example after a
  /// stopping time has been observed).
  virtual bool finished() const { return false; }
};

class NullObserver final : public PathObserver {};

class PathRecorder final : public PathObserver {
 public:
  void on_start(double t, StateView x) override;
  void on_jump(double t, std::uint32_t channel, StateView x) override;
  void on_end(double t, StateView x) override;

  TrajectoryPath& path() { return path_; }
  TrajectoryPath take() { return std::move(path_); }

 private:
  TrajectoryPath path_;
};

/// Records X(t) at a sorted list of times. Right-continuous: a jump exactly
/// at a grid time is included.
class GridObserver final : public PathObserver {
 public:
  GridObserver(std::vector<double> times, std::size_t species_count);

  void on_start(double t, StateView x) override;
  void on_jump(double t, std::uint32_t channel, StateView x) override;
  void on_end(double t, StateView x) override;

  const std::vector<double>& times() const { return times_; }
  /// values()[i * d + s] is species s at times()[i].
  const std::vector<Count>& values() const { return values_; }
  Count value(std::size_t i, std::size_t species) const { return values_[i * d_ + species]; }

 private:
  void flush_until(double t);

  std::vector<double> times_;
  std::size_t d_;
  std::vector<Count> values_;
  State current_;
  std::size_t next_ = 0;
};

/// Fans one path out to several observers.
class ObserverChain final : public PathObserver {
 public:
  explicit ObserverChain(std::vector<PathObserver*> observers)
      : observers_(std::move(observers)) {}

  void on_start(double t, StateView x) override {
    for (PathObserver* o : observers_) o->on_start(t, x);
  }
  void on_jump(double t, std::uint32_t channel, StateView x) override {
    for (PathObserver* o : observers_) o->on_jump(t, channel, x);
  }
  void on_end(double t, StateView x) override {
    for (PathObserver* o : observers_) o->on_end(t, x);
  }
  bool finished() const override {
    for (const PathObserver* o : observers_) {
      if (!o->finished()) return false;
    }
    return !observers_.empty();
  }

 private:
  std::vector<PathObserver*> observers_;
};

}  // namespace issa
