#include "issa/functional.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "issa/csv.hpp"

namespace issa {

Functional Functional::species_at(std::vector<std::size_t> species, std::vector<double> times) {
  if (species.empty() || times.empty()) {
    throw std::invalid_argument("functional needs at least one species and one time");
  }
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("functional times must be sorted");
  }
  Functional f;
  f.kind_ = Kind::kSpeciesAt;
  f.species_ = std::move(species);
  f.times_ = std::move(times);
  return f;
}

Functional Functional::extinction(std::size_t species, double before) {
  if (!(before > 0.0)) throw std::invalid_argument("extinction horizon must be > 0");
  Functional f;
  f.kind_ = Kind::kExtinction;
  f.species_ = {species};
  f.times_ = {before};
  return f;
}

std::size_t Functional::output_count() const {
  return kind_ == Kind::kExtinction ? 1 : species_.size() * times_.size();
}

double Functional::horizon() const { return times_.back(); }

std::string Functional::label(std::size_t i, const std::vector<std::string>& names) const {
  auto name = [&](std::size_t s) {
    return s < names.size() ? names[s] : "X" + std::to_string(s + 1);
  };
  if (kind_ == Kind::kExtinction) {
    return "P(tau_" + name(species_[0]) + "<" + format_number(times_[0]) + ")";
  }
  const std::size_t ti = i / species_.size();
  const std::size_t si = i % species_.size();
  return name(species_[si]) + "(" + format_number(times_[ti]) + ")";
}

std::vector<double> Functional::evaluate(const TrajectoryPath& path) const {
  FunctionalObserver obs(*this, path.species_count());
  obs.on_start(0.0, path.initial_state());
  for (std::size_t i = 0; i < path.jump_count(); ++i) {
    obs.on_jump(path.jump_times()[i], path.channel_indices()[i], path.state(i));
  }
  obs.on_end(path.t_end(), path.final_state());
  return obs.values();
}

FunctionalObserver::FunctionalObserver(const Functional& f, std::size_t species_count)
    : f_(&f), d_(species_count) {
  for (std::size_t s : f.species()) {
    if (s >= species_count) throw std::invalid_argument("functional species out of range");
  }
}

void FunctionalObserver::on_start(double /*t*/, StateView x) {
  current_.assign(x.begin(), x.end());
  next_ = 0;
  values_.clear();
  hit_ = f_->kind() == Functional::Kind::kExtinction && x[f_->species()[0]] <= 0;
}

void FunctionalObserver::record_grid_until(double t) {
  const auto& times = f_->times();
  while (next_ < times.size() && times[next_] < t) {
    for (std::size_t s : f_->species()) values_.push_back(static_cast<double>(current_[s]));
    ++next_;
  }
}

void FunctionalObserver::on_jump(double t, std::uint32_t /*channel*/, StateView x) {
  if (f_->kind() == Functional::Kind::kExtinction) {
    if (!hit_ && t < f_->times()[0] && x[f_->species()[0]] <= 0) hit_ = true;
    return;
  }
  record_grid_until(t);
  current_.assign(x.begin(), x.end());
}

void FunctionalObserver::on_end(double /*t*/, StateView /*x*/) {
  if (f_->kind() == Functional::Kind::kExtinction) {
    values_.assign(1, hit_ ? 1.0 : 0.0);
    return;
  }
  record_grid_until(std::numeric_limits<double>::infinity());
}

bool FunctionalObserver::finished() const {
  return f_->kind() == Functional::Kind::kExtinction && hit_;
}

}  // namespace issa
