#pragma once

// Small goodness-of-fit helpers shared by the unit and acceptance tests.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testing_stats {

// sup |F_n - F| for a sample against a continuous cdf.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Two-sample KS distance; ties (integer data) are handled by stepping past
// every copy of a value before comparing.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// Asymptotic critical value c(alpha) = sqrt(-ln(alpha/2)/2).
inline double ks_c(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }

inline double ks_critical(double alpha, double n) { return ks_c(alpha) / std::sqrt(n); }

inline double ks_critical(double alpha, double n, double m) {
  return ks_c(alpha) * std::sqrt((n + m) / (n * m));
}

// Pearson statistic over bins with given expected counts.
inline double chi_square(const std::vector<double>& observed, const std::vector<double>& expected) {
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - expected[i];
    s += d * d / expected[i];
  }
  return s;
}

inline double chi_square_critical(double alpha, double dof) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal(), p);
}

// Poisson pmf via logs, stable for moderate means.
inline double poisson_pmf(double mean, int k) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

// Bins 0..hi-1 plus an upper tail bin, so the expected counts sum to n.
inline std::vector<double> poisson_expected(double mean, int hi, double n) {
  std::vector<double> e(static_cast<std::size_t>(hi) + 1);
  double acc = 0.0;
  for (int k = 0; k < hi; ++k) {
    e[static_cast<std::size_t>(k)] = n * poisson_pmf(mean, k);
    acc += e[static_cast<std::size_t>(k)];
  }
  e.back() = n - acc;
  return e;
}

inline std::vector<double> bin_counts(const std::vector<long long>& xs, int hi) {
  std::vector<double> o(static_cast<std::size_t>(hi) + 1, 0.0);
  for (long long x : xs) o[static_cast<std::size_t>(std::min<long long>(x, hi))] += 1.0;
  return o;
}

}  // namespace testing_stats
