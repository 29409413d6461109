#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace wavebound {

/// Bisection on the sign of f over [lo, hi]; f(lo) and f(hi) must have
/// opposite signs. Stops when hi - lo <= tol. Returns the midpoint of the
/// final bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 200) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw std::domain_error("bisect: interval does not bracket a sign change");
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Bisection on a monotone predicate: pred(lo) == false, pred(hi) == true.
/// Returns the final bracket.
template <class P>
std::pair<double, double> bisect_predicate(P&& pred, double lo, double hi, double tol, int max_iter = 200) {
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi};
}

struct Minimum {
  double x;
  double value;
};

/// Golden-section search for a local minimum of a unimodal f on [lo, hi].
template <class F>
Minimum golden_section(F&& f, double lo, double hi, double tol, int max_iter = 300) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? Minimum{x1, f1} : Minimum{x2, f2};
}

}  // namespace wavebound
