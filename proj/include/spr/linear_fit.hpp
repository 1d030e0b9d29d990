#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "spr/error.hpp"

namespace spr {

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;      // NaN when there are no residual degrees of freedom
  double intercept_stderr = 0.0;
  double r_squared = 0.0;
  std::size_t count = 0;

  double operator()(double x) const { return intercept + slope * x; }
};

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::string where = "linear_fit::fit_line";
  if (x.size() != y.size()) fail(ErrorKind::fit, where, "x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) fail(ErrorKind::fit, where, "at least two points are required");

  // Centered sums keep the normal equations well conditioned.
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) fail(ErrorKind::fit, where, "x values are all identical");

  LinearFit fit;
  fit.count = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit(x[i]);
    ssr += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  if (fit.r_squared < 0.0) fit.r_squared = 0.0;

  if (n > 2) {
    const double sigma2 = ssr / static_cast<double>(n - 2);
    fit.slope_stderr = std::sqrt(sigma2 / sxx);
    fit.intercept_stderr = std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  } else {
    fit.slope_stderr = std::numeric_limits<double>::quiet_NaN();
    fit.intercept_stderr = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

}  // namespace spr
