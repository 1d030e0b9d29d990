#pragma once

#include <cmath>
#include <concepts>
#include <optional>

namespace spr {

struct RootResult {
  double x;
  double value;
  int iterations;
  bool converged;
};

struct RootTolerance {
  double x = 1e-12;      // stop once the bracket is narrower than this
  double value = 0.0;    // or once |f(x)| <= value
  int max_iterations = 200;
};

/**
 * Bracketed root search combining regula falsi with the Illinois weight
 * halving, falling back to bisection when the secant step stalls.
 *
 * Requires f(lo) and f(hi) to differ in sign (or one of them to vanish).
 * The bracket always contains a sign change, so the result stays bounded
 * even when f is slightly noisy near the root.
 */
template <std::invocable<double> F>
std::optional<RootResult> find_root_bracketed(F&& f, double lo, double hi, double f_lo, double f_hi,
                                              const RootTolerance& tol = {}) {
  if (f_lo == 0.0) return RootResult{lo, 0.0, 0, true};
  if (f_hi == 0.0) return RootResult{hi, 0.0, 0, true};
  if ((f_lo > 0.0) == (f_hi > 0.0)) return std::nullopt;

  double a = lo, fa = f_lo;
  double b = hi, fb = f_hi;
  int side = 0;
  double x = a, fx = fa;
  for (int it = 1; it <= tol.max_iterations; ++it) {
    x = (a * fb - b * fa) / (fb - fa);
    const double width = b - a;
    // Keep the secant step well inside the bracket; otherwise bisect.
    if (!(x > a + 0.01 * width && x < b - 0.01 * width)) x = 0.5 * (a + b);
    fx = f(x);

    if (std::abs(fx) <= tol.value) return RootResult{x, fx, it, true};
    if ((fx > 0.0) == (fb > 0.0)) {
      b = x;
      fb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = fx;
      if (side == +1) fb *= 0.5;
      side = +1;
    }
    if (std::abs(b - a) <= tol.x) return RootResult{x, fx, it, true};
  }
  return RootResult{x, fx, tol.max_iterations, false};
}

}  // namespace spr
