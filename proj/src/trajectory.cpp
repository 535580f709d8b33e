#include "issa/trajectory.hpp"

#include <algorithm>
#include <stdexcept>

namespace issa {

TrajectoryPath::TrajectoryPath(StateView initial, double t_end)
    : t_end_(t_end), initial_(initial.begin(), initial.end()) {}

void TrajectoryPath::push(double t, std::uint32_t channel, StateView x) {
  times_.push_back(t);
  channels_.push_back(channel);
  states_.insert(states_.end(), x.begin(), x.end());
}

StateView TrajectoryPath::state_at(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return initial_;
  return state(static_cast<std::size_t>(it - times_.begin()) - 1);
}

void PathRecorder::on_start(double /*t*/, StateView x) { path_ = TrajectoryPath(x, 0.0); }

void PathRecorder::on_jump(double t, std::uint32_t channel, StateView x) {
  path_.push(t, channel, x);
}

void PathRecorder::on_end(double t, StateView /*x*/) { path_.set_t_end(t); }

GridObserver::GridObserver(std::vector<double> times, std::size_t species_count)
    : times_(std::move(times)), d_(species_count) {
  if (!std::is_sorted(times_.begin(), times_.end())) {
    throw std::invalid_argument("grid times must be sorted");
  }
  values_.reserve(times_.size() * d_);
}

void GridObserver::on_start(double /*t*/, StateView x) {
  values_.clear();
  next_ = 0;
  current_.assign(x.begin(), x.end());
}

// Every grid time strictly before t sees the state held before the jump at t.
void GridObserver::flush_until(double t) {
  while (next_ < times_.size() && times_[next_] < t) {
    values_.insert(values_.end(), current_.begin(), current_.end());
    ++next_;
  }
}

void GridObserver::on_jump(double t, std::uint32_t /*channel*/, StateView x) {
  flush_until(t);
  current_.assign(x.begin(), x.end());
}

void GridObserver::on_end(double /*t*/, StateView /*x*/) {
  // The path is constant after the last jump, including grid times past the
  // horizon or after an early stop.
  while (next_ < times_.size()) {
    values_.insert(values_.end(), current_.begin(), current_.end());
    ++next_;
  }
}

}  // namespace issa
