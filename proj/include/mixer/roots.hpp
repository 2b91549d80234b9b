#pragma once

#include <cmath>
#include <utility>

#include "mixer/errors.hpp"

namespace mixer {

// Bisection on [lo, hi]; requires a sign change. Refines until the bracket
// width drops below xtol or the midpoint stops moving in double precision.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol = 1e-13,
              int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw NoRootError("bisect: no sign change on bracket");
  for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at double resolution
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Maximum of f over [lo, hi] for smooth f with a single interior maximum
// once bracketed: a uniform grid localizes the peak, golden-section refines
// it. The grid pass makes this safe for min-then-max shapes as long as the
// grid resolves the basin (callers use >= 256 points on O(1) intervals).
template <class F>
std::pair<double, double> grid_golden_max(F&& f, double lo, double hi,
                                          int grid_points = 256,
                                          double xtol = 1e-12) {
  double best_x = lo;
  double best_f = f(lo);
  const double step = (hi - lo) / grid_points;
  for (int i = 1; i <= grid_points; ++i) {
    const double x = (i == grid_points) ? hi : lo + i * step;
    const double fx = f(x);
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  double a = best_x - step;
  double b = best_x + step;
  if (a < lo) a = lo;
  if (b > hi) b = hi;
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
    if (x2 <= x1) break;  // interval at double resolution
  }
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  if (fm >= f1 && fm >= f2) return {xm, fm};
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace mixer
