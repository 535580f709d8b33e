#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "issa/errors.hpp"

namespace issa {
namespace detail {

// Panels longer than this are always split, so a periodic integrand cannot
// fool the error estimate by aliasing on a long first panel.
inline constexpr double kMaxSimpsonPanel = 0.05;

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, bool& ok) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // The halved tolerance can drop below the rounding error of the panel sum
  // on long brackets; never ask for more than a few ulps of the value.
  const double limit = 15.0 * std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() *
                                                std::fabs(left + right));
  if ((std::fabs(delta) <= limit && b - a <= kMaxSimpsonPanel) || depth <= 0) {
    if (depth <= 0 && std::fabs(delta) > limit) ok = false;
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok);
}

// Adaptive Simpson on [a, b] given f(a) and f(b).
template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fb, double tol,
                        int max_depth, bool& ok) {
  if (b <= a) return 0.0;
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth, ok);
}

}  // namespace detail

template <class Rate>
double solve_hitting_time(const Rate& rate, double t0, double t_max, double target,
                          const HittingTimeOptions& options) {
  const double span = t_max - t0;
  if (!(span > 0.0)) return std::numeric_limits<double>::infinity();
  const double tol = options.tol;
  const double qtol = tol / 10.0;

  auto fail = [&](const char* what, double end) -> double {
    throw SimulationError(what, t0, t0 + end);
  };
  auto integral = [&](double a, double b, double fa, double fb) {
    bool ok = true;
    const double v = detail::adaptive_simpson(rate, t0 + a, t0 + b, fa, fb, qtol,
                                              options.max_depth, ok);
    if (!ok) fail("hitting-time quadrature did not converge", b);
    return v;
  };

  // Grow [lo, p] until the cumulative integral reaches the target.
  double lo = 0.0;
  double i_lo = 0.0;
  double f_lo = rate(t0);
  double width = f_lo > 0.0 ? target / f_lo : std::min(detail::kMaxSimpsonPanel, span);
  double hi = 0.0;
  double i_hi = 0.0;
  double f_hi = 0.0;
  int iter = 0;
  for (;; ++iter) {
    if (iter > options.max_iterations) fail("hitting-time bracket search did not converge", lo);
    const double p = std::min(lo + width, span);
    const double fp = rate(t0 + p);
    const double ip = i_lo + integral(lo, p, f_lo, fp);
    if (ip >= target) {
      hi = p;
      i_hi = ip;
      f_hi = fp;
      break;
    }
    if (p >= span) return std::numeric_limits<double>::infinity();
    const double newton = fp > 0.0 ? 1.25 * (target - ip) / fp : 2.0 * width;
    lo = p;
    i_lo = ip;
    f_lo = fp;
    width = std::max(newton, 2.0 * width);
  }

  if (i_hi - target <= tol) return hi;

  // Safeguarded Newton on F(p) = I(p) - target inside [lo, hi].
  double p = f_hi > 0.0 ? hi - (i_hi - target) / f_hi : 0.5 * (lo + hi);
  if (!(p > lo && p < hi)) p = 0.5 * (lo + hi);
  for (; iter <= options.max_iterations; ++iter) {
    const double fp = rate(t0 + p);
    const double ip = i_lo + integral(lo, p, f_lo, fp);
    const double F = ip - target;
    if (std::fabs(F) <= tol) return p;
    if (F < 0.0) {
      lo = p;
      i_lo = ip;
      f_lo = fp;
    } else {
      hi = p;
    }
    if (hi - lo <= tol * (1.0 + std::fabs(t0 + hi))) return F < 0.0 ? hi : p;
    double q = fp > 0.0 ? p - F / fp : 0.5 * (lo + hi);
    if (!(q > lo && q < hi)) q = 0.5 * (lo + hi);
    p = q;
  }
  return fail("hitting-time root search did not converge", hi);
}

}  // namespace issa
