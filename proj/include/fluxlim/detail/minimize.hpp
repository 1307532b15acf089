#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <boost/math/tools/minima.hpp>

namespace fluxlim::detail {

struct Minimum {
  double arg;
  double value;
};

// Bracketed 1-D minimization (Brent). Endpoints are always compared so a
// monotone objective returns the exact endpoint instead of a point 1e-8 away.
template <typename F>
Minimum minimize_1d(F&& f, double lo, double hi) {
  const double flo = f(lo);
  if (!(hi > lo)) return {lo, flo};
  const double fhi = f(hi);
  std::uintmax_t iters = 200;
  auto [x, fx] = boost::math::tools::brent_find_minima(
      f, lo, hi, std::numeric_limits<double>::digits / 2, iters);
  Minimum best{x, fx};
  // ties go to the left endpoint, then the right one
  if (fhi <= best.value) best = {hi, fhi};
  if (flo <= best.value) best = {lo, flo};
  return best;
}

// Smallest s in [lo, hi] with pred(s) true, given pred(hi) true and pred
// monotone false -> true on the bracket.
template <typename P>
double bisect_first_true(P&& pred, double lo, double hi, int iters = 80) {
  if (pred(lo)) return lo;
  for (int i = 0; i < iters && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) hi = mid; else lo = mid;
  }
  return hi;
}

// Largest s in [lo, hi] with pred(s) true, given pred(lo) true.
template <typename P>
double bisect_last_true(P&& pred, double lo, double hi, int iters = 80) {
  if (pred(hi)) return hi;
  for (int i = 0; i < iters && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) lo = mid; else hi = mid;
  }
  return lo;
}

}  // namespace fluxlim::detail
