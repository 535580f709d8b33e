#pragma once

#include <cmath>
#include <cstdint>

namespace issa {

/// Streaming central moments up to order four (Pebay's one-pass update and
/// pairwise merge). Merging in a fixed order gives bit-identical results
/// regardless of how samples were split across workers.
class Moments {
 public:
  void add(double x) {
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double dn = delta / n;
    const double dn2 = dn * dn;
    const double term = delta * dn * n1;
    mean_ += dn;
    m4_ += term * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_ - 4.0 * dn * m3_;
    m3_ += term * dn * (n - 2.0) - 3.0 * dn * m2_;
    m2_ += term;
  }

  void merge(const Moments& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double delta = o.mean_ - mean_;
    const double d2 = delta * delta;
    const double d3 = d2 * delta;
    const double d4 = d2 * d2;
    const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
    const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) +
                      3.0 * delta * (na * o.m2_ - nb * m2_) / n;
    const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                      6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                      4.0 * delta * (na * o.m3_ - nb * m3_) / n;
    mean_ += delta * nb / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += o.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance (zero for fewer than two samples).
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }
  /// Fourth central moment (biased plug-in).
  double central_m4() const { return n_ > 0 ? m4_ / static_cast<double>(n_) : 0.0; }
  /// Large-sample standard error of the sample variance, sqrt((m4 - s^4) / n).
  double variance_standard_error() const {
    if (n_ < 2) return 0.0;
    const double s2 = variance();
    const double v = central_m4() - s2 * s2;
    return v > 0.0 ? std::sqrt(v / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

/// Two-sided 95% normal quantile used for confidence half-widths.
inline constexpr double kZ95 = 1.959963984540054;

}  // namespace issa
