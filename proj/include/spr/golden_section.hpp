#pragma once

#include <cmath>
#include <concepts>

namespace spr {

struct MinimumPoint {
  double x;
  double value;
  int iterations;
};

/// Golden-section search for the minimum of a unimodal function on [lo, hi],
/// stopping once the bracket is narrower than `tolerance`.
template <std::invocable<double> F>
MinimumPoint golden_section_minimize(F&& f, double lo, double hi, double tolerance, int max_iterations = 500) {
  constexpr double inv_phi = 0.6180339887498948482;  // (sqrt(5) - 1) / 2
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (b - a > tolerance && it < max_iterations) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  // Report whichever interior probe is lower; the midpoint is never evaluated.
  return fc <= fd ? MinimumPoint{c, fc, it} : MinimumPoint{d, fd, it};
}

}  // namespace spr
