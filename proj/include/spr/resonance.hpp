#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spr/constants.hpp"
#include "spr/error.hpp"
#include "spr/golden_section.hpp"
#include "spr/layer.hpp"
#include "spr/linear_fit.hpp"
#include "spr/optics.hpp"

/// Resonance-angle location and the quantities derived from it: RU shifts,
/// bulk sensitivity, penetration depth and depth-resolved sensitivity.
namespace spr::resonance {

struct AngleSweep {
  double start_deg;
  double end_deg;
  double step_deg;

  std::size_t count() const { return static_cast<std::size_t>(std::floor((end_deg - start_deg) / step_deg + 1e-9)) + 1; }
  double at(std::size_t i) const { return std::min(start_deg + static_cast<double>(i) * step_deg, end_deg); }
};

inline void validate(const AngleSweep& sweep) {
  const std::string where = "spr_engine::AngleSweep";
  if (!std::isfinite(sweep.start_deg) || !std::isfinite(sweep.end_deg) || !std::isfinite(sweep.step_deg)) {
    fail(ErrorKind::domain, where, "sweep bounds must be finite");
  }
  if (!(sweep.start_deg < sweep.end_deg)) fail(ErrorKind::domain, where, "sweep start must precede its end");
  if (!(sweep.step_deg > 0.0)) fail(ErrorKind::domain, where, "sweep step must be positive");
  if ((sweep.end_deg - sweep.start_deg) / sweep.step_deg > 1e7) fail(ErrorKind::domain, where, "sweep has too many points");
  if (sweep.start_deg < 0.0 || sweep.end_deg >= 90.0) fail(ErrorKind::domain, where, "sweep must lie within [0, 90) degrees");
}

struct AngleBracket {
  double lo_deg;
  double hi_deg;
};

struct CurvePoint {
  double angle_deg;
  double reflectance;
};

struct SprCurve {
  std::vector<CurvePoint> points;
  std::optional<std::size_t> resonance_row;  // grid row holding the coarse minimum
  std::optional<double> resonance_angle_deg;
  std::optional<double> resonance_reflectance;

  bool has_resonance() const { return resonance_angle_deg.has_value(); }
};

struct ResonanceShift {
  double delta_degrees;
  double delta_ru;
};

struct ResonanceOptions {
  double coarse_step_deg = 0.01;
  double tolerance_deg = 1e-10;
};

inline double angle_shift_to_ru(double delta_deg) { return delta_deg * constants::ru_per_degree; }
inline double ru_to_angle_shift(double ru) { return ru * constants::degrees_per_ru; }

inline double reflectance_at(const LayerStack& stack, double wavelength_nm, double angle_deg) {
  return optics::reflectance(stack, OpticalContext::from_degrees(wavelength_nm, angle_deg));
}

/// Search window starting just past total internal reflection onset:
/// [theta_c + 0.1, theta_c + 15] degrees, capped below grazing incidence.
/// Without a critical angle the whole (0, 90) range is used.
inline AngleBracket default_bracket(const LayerStack& stack) {
  if (const auto theta_c = optics::critical_angle_deg(stack)) {
    return {*theta_c + 0.1, std::min(*theta_c + 15.0, 89.9)};
  }
  return {0.1, 89.9};
}

inline AngleBracket merge(const AngleBracket& a, const AngleBracket& b) {
  return {std::min(a.lo_deg, b.lo_deg), std::max(a.hi_deg, b.hi_deg)};
}

namespace detail {

/// Indices of interior local minima of a sampled curve; plateaus count once.
// Differences below this are roundoff, e.g. ripple on a totally reflecting plateau.
inline constexpr double reflectance_noise = 1e-12;

inline std::vector<std::size_t> interior_minima(const std::vector<double>& r) {
  std::vector<std::size_t> minima;
  const std::size_t n = r.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (r[i] < r[i - 1] - reflectance_noise) {
      std::size_t j = i;
      while (j + 1 < n && std::abs(r[j + 1] - r[i]) <= reflectance_noise) ++j;
      if (j + 1 < n && r[j + 1] > r[i] + reflectance_noise) minima.push_back(i);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return minima;
}

inline double refine(const LayerStack& stack, double wavelength_nm, double lo, double hi, double tolerance) {
  const auto best = golden_section_minimize(
      [&](double angle) { return reflectance_at(stack, wavelength_nm, angle); }, lo, hi, tolerance);
  return best.x;
}

}  // namespace detail

/// Reflectance sampled over the sweep with the global grid minimum refined.
/// A minimum on either sweep boundary leaves the resonance absent.
inline SprCurve spr_curve(const LayerStack& stack, double wavelength_nm, const AngleSweep& sweep,
                          const ResonanceOptions& options = {}) {
  validate(sweep);
  SprCurve curve;
  const std::size_t n = sweep.count();
  curve.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = sweep.at(i);
    curve.points.push_back({angle, reflectance_at(stack, wavelength_nm, angle)});
  }

  const auto it = std::min_element(curve.points.begin(), curve.points.end(),
                                   [](const CurvePoint& a, const CurvePoint& b) { return a.reflectance < b.reflectance; });
  const auto row = static_cast<std::size_t>(it - curve.points.begin());
  if (row == 0 || row + 1 == n) return curve;
  // A flat curve has no resonance even if the first minimum is interior.
  if (!(it->reflectance < curve.points[row - 1].reflectance) && !(it->reflectance < curve.points[row + 1].reflectance)) {
    return curve;
  }

  const double angle = detail::refine(stack, wavelength_nm, curve.points[row - 1].angle_deg,
                                      curve.points[row + 1].angle_deg, options.tolerance_deg);
  curve.resonance_row = row;
  curve.resonance_angle_deg = angle;
  curve.resonance_reflectance = reflectance_at(stack, wavelength_nm, angle);
  return curve;
}

/// SPR angle inside `bracket`: a coarse scan must find exactly one interior
/// local minimum, which golden-section search then refines.
inline double find_spr_angle(const LayerStack& stack, double wavelength_nm, const AngleBracket& bracket,
                             const ResonanceOptions& options = {}) {
  const std::string where = "spr_engine::find_spr_angle";
  if (!(bracket.lo_deg < bracket.hi_deg) || bracket.lo_deg < 0.0 || bracket.hi_deg >= 90.0) {
    fail(ErrorKind::domain, where, "bracket must be an increasing interval inside [0, 90)");
  }
  const double span = bracket.hi_deg - bracket.lo_deg;
  const auto steps = static_cast<std::size_t>(std::max(2.0, std::ceil(span / options.coarse_step_deg)));
  const double step = span / static_cast<double>(steps);

  std::vector<double> r(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double angle = i == steps ? bracket.hi_deg : bracket.lo_deg + static_cast<double>(i) * step;
    r[i] = reflectance_at(stack, wavelength_nm, angle);
  }

  const auto minima = detail::interior_minima(r);
  if (minima.empty()) {
    fail(ErrorKind::bracket, where,
         "no interior reflectance minimum in [" + std::to_string(bracket.lo_deg) + ", " +
             std::to_string(bracket.hi_deg) + "] deg");
  }
  if (minima.size() > 1) {
    fail(ErrorKind::ambiguity, where, std::to_string(minima.size()) + " reflectance minima found in bracket");
  }
  const std::size_t i = minima.front();
  const double lo = bracket.lo_deg + static_cast<double>(i - 1) * step;
  const double hi = std::min(bracket.lo_deg + static_cast<double>(i + 1) * step, bracket.hi_deg);
  return detail::refine(stack, wavelength_nm, lo, hi, options.tolerance_deg);
}

inline double find_spr_angle(const LayerStack& stack, double wavelength_nm, const ResonanceOptions& options = {}) {
  return find_spr_angle(stack, wavelength_nm, default_bracket(stack), options);
}

/// Default probed layer: the fourth layer (prism, metal, hydrogel, sample)
/// or the final medium in shorter stacks.
inline std::size_t default_sample_index(const LayerStack& stack) { return std::min<std::size_t>(3, stack.size() - 1); }

namespace detail {

inline void require_non_prism(const LayerStack& stack, std::size_t index, const std::string& where) {
  if (index == 0 || index >= stack.size()) {
    fail(ErrorKind::domain, where, "layer index " + std::to_string(index) + " must name a non-prism layer");
  }
}

}  // namespace detail

/**
 * Bulk sensitivity of the SPR angle to the refractive index n = sqrt(eps) of
 * one layer, in RU per refractive-index unit, by central difference:
 * (theta(n + dn) - theta(n - dn)) / (2 dn).
 */
inline double bulk_sensitivity(const LayerStack& stack, double wavelength_nm, std::size_t layer_index,
                               double dn = 1e-4, const ResonanceOptions& options = {}) {
  const std::string where = "spr_engine::bulk_sensitivity";
  detail::require_non_prism(stack, layer_index, where);
  if (!(dn > 0.0)) fail(ErrorKind::domain, where, "index step must be positive");

  const Complex n = std::sqrt(stack[layer_index].permittivity);
  const auto up = stack.with_permittivity(layer_index, (n + dn) * (n + dn));
  const auto down = stack.with_permittivity(layer_index, (n - dn) * (n - dn));
  const auto bracket = merge(default_bracket(up), default_bracket(down));
  try {
    const double theta_up = find_spr_angle(up, wavelength_nm, bracket, options);
    const double theta_down = find_spr_angle(down, wavelength_nm, bracket, options);
    return angle_shift_to_ru(theta_up - theta_down) / (2.0 * dn);
  } catch (const Error& e) {
    fail(ErrorKind::perturbation, where, std::string("resonance lost under perturbation: ") + e.what());
  }
}

/// Intensity decay length 1 / (2 Im k_z) of the sample layer at the SPR angle.
inline double penetration_depth_analytic(const LayerStack& stack, double wavelength_nm, std::size_t sample_index,
                                         const ResonanceOptions& options = {}) {
  const std::string where = "spr_engine::penetration_depth_analytic";
  detail::require_non_prism(stack, sample_index, where);
  const double theta = find_spr_angle(stack, wavelength_nm, options);
  const double k0 = optics::vacuum_wavenumber(wavelength_nm);
  const double k = optics::tangential_wavevector(k0, stack.prism_permittivity(), theta * constants::radians_per_degree);
  const Complex kz = optics::normal_wavevector(stack[sample_index].permittivity, k0, k);
  if (!(kz.imag() > 0.0)) {
    fail(ErrorKind::model, where, "field in the sample layer is propagating, not evanescent");
  }
  return 1.0 / (2.0 * kz.imag());
}

/**
 * Copy of `stack` with permittivity raised by `delta_eps` over the depth
 * interval [depth, depth + thickness) measured from the top of layer
 * `from_index`. Layers crossed by the interval are split; the interval may
 * run past `from_index` into deeper layers, including the final medium.
 */
inline LayerStack perturb_slab(const LayerStack& stack, std::size_t from_index, double depth_nm, double thickness_nm,
                               double delta_eps) {
  const std::string where = "spr_engine::perturb_slab";
  detail::require_non_prism(stack, from_index, where);
  if (!(depth_nm >= 0.0) || !(thickness_nm > 0.0)) fail(ErrorKind::domain, where, "slab depth must be >= 0 and thickness > 0");

  const double slab_lo = depth_nm;
  const double slab_hi = depth_nm + thickness_nm;
  std::vector<Layer> out(stack.begin(), stack.begin() + static_cast<std::ptrdiff_t>(from_index));
  double top = 0.0;
  for (std::size_t i = from_index; i < stack.size(); ++i) {
    const Layer& layer = stack[i];
    const double bottom = layer.semi_infinite() ? std::numeric_limits<double>::infinity() : top + *layer.thickness_nm;
    const double lo = std::max(top, slab_lo);
    const double hi = std::min(bottom, slab_hi);
    if (!(lo < hi)) {
      out.push_back(layer);
    } else {
      auto piece = [&](double a, double b, Complex eps) {
        if (std::isinf(b)) {
          out.push_back(Layer::bulk(layer.name, eps));
        } else if (b > a) {
          out.push_back(Layer::film(layer.name, eps, b - a));
        }
      };
      piece(top, lo, layer.permittivity);
      piece(lo, hi, layer.permittivity + delta_eps);
      piece(hi, bottom, layer.permittivity);
    }
    top = bottom;
  }
  return LayerStack(std::move(out));
}

struct SensitivityProbe {
  double delta_eps = 1e-3;
  double slab_thickness_nm = 2.0;
  std::vector<double> depths_nm;
};

struct ProfilePoint {
  double depth_nm;
  double shift_ru;
};

struct PenetrationReport {
  double analytic_dp_nm;
  double fitted_dp_nm;
  std::vector<ProfilePoint> profile;
  double fit_r_squared;
};

/// Depth-resolved SPR response to a thin perturbing slab, fitted to an
/// exponential decay by least squares on log(shift).
inline PenetrationReport sensitivity_profile(const LayerStack& stack, double wavelength_nm, const SensitivityProbe& probe,
                                             std::size_t sample_index, const ResonanceOptions& options = {}) {
  const std::string where = "spr_engine::sensitivity_profile";
  detail::require_non_prism(stack, sample_index, where);
  if (probe.depths_nm.size() < 2) fail(ErrorKind::domain, where, "need at least two probe depths");
  if (!(probe.delta_eps != 0.0) || !std::isfinite(probe.delta_eps)) fail(ErrorKind::domain, where, "delta_eps must be non-zero");

  const AngleBracket bracket = default_bracket(stack);
  const double theta0 = find_spr_angle(stack, wavelength_nm, bracket, options);

  PenetrationReport report{};
  std::vector<double> z, log_shift;
  for (const double depth : probe.depths_nm) {
    const auto perturbed = perturb_slab(stack, sample_index, depth, probe.slab_thickness_nm, probe.delta_eps);
    const double shift = angle_shift_to_ru(find_spr_angle(perturbed, wavelength_nm, bracket, options) - theta0);
    report.profile.push_back({depth, shift});
    if (!(shift > 0.0)) {
      fail(ErrorKind::profile, where, "non-positive shift " + std::to_string(shift) + " RU at depth " + std::to_string(depth) + " nm");
    }
    z.push_back(depth);
    log_shift.push_back(std::log(shift));
  }

  const LinearFit fit = fit_line(z, log_shift);
  if (!(fit.slope < 0.0)) fail(ErrorKind::profile, where, "sensitivity does not decay with depth");
  report.fitted_dp_nm = -1.0 / fit.slope;
  report.fit_r_squared = fit.r_squared;
  report.analytic_dp_nm = penetration_depth_analytic(stack, wavelength_nm, sample_index, options);
  return report;
}

inline std::vector<double> depth_grid(double start_nm, double end_nm, double step_nm) {
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double z = start_nm + static_cast<double>(i) * step_nm;
    if (z > end_nm + 1e-9 * step_nm) break;
    out.push_back(z);
  }
  return out;
}

/// theta_SPR(after) - theta_SPR(before), each located in its own default bracket.
/// A shared bracket would reach below the critical angle of whichever stack has
/// the denser final medium, where a second dip can appear.
inline ResonanceShift scenario_shift(const LayerStack& before, const LayerStack& after, double wavelength_nm,
                                     const ResonanceOptions& options = {}) {
  const double delta = find_spr_angle(after, wavelength_nm, options) - find_spr_angle(before, wavelength_nm, options);
  return {delta, angle_shift_to_ru(delta)};
}

}  // namespace spr::resonance
