#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <set>
#include <string>
#include <vector>

#include "spr/csv.hpp"
#include "spr/error.hpp"
#include "spr/layer.hpp"
#include "spr/linear_fit.hpp"
#include "spr/resonance.hpp"
#include "spr/root_bracket.hpp"

/// Measured SPR shift -> permittivity / refractive-index change of one layer,
/// and refractive-index increments from concentration series.
namespace spr::inversion {

struct InversionResult {
  double delta_eps;
  double delta_n;
  double achieved_shift_ru;
  int iterations;
};

struct InversionOptions {
  double bracket_width = 0.2;          // search delta_eps over [0, bracket_width]
  double shift_tolerance_ru = 0.05;    // acceptance bound on |achieved - target|
  double eps_tolerance = 1e-12;        // bracket width at which iteration stops
  int monotonic_probes = 8;            // coarse probes used to verify monotonicity
  int max_iterations = 200;
  resonance::ResonanceOptions resonance{};
};

/// sqrt(eps0 + delta_eps) - sqrt(eps0).
inline double epsilon_delta_to_n_delta(double eps0, double delta_eps) {
  if (!(eps0 > 0.0) || !(eps0 + delta_eps > 0.0)) {
    fail(ErrorKind::domain, "inversion::epsilon_delta_to_n_delta", "permittivity must stay positive");
  }
  // Rationalized form avoids cancellation for small delta_eps.
  return delta_eps / (std::sqrt(eps0 + delta_eps) + std::sqrt(eps0));
}

/// (n0 + delta_n)^2 - n0^2.
inline double n_delta_to_epsilon_delta(double n0, double delta_n) { return delta_n * (2.0 * n0 + delta_n); }

/**
 * Finds the real permittivity change delta_eps of layer `layer_index` whose
 * forward-modelled SPR shift equals `target_shift_ru`.
 *
 * The forward map must increase or decrease monotonically over
 * [0, bracket_width]; this is checked on a coarse probe grid first. The root
 * is then refined by Illinois regula falsi down to a delta_eps bracket of
 * eps_tolerance.
 */
inline InversionResult invert_shift_to_epsilon(const LayerStack& stack, double wavelength_nm, std::size_t layer_index,
                                               double target_shift_ru, const InversionOptions& options = {}) {
  const std::string where = "inversion::invert_shift_to_epsilon";
  if (layer_index == 0 || layer_index >= stack.size()) {
    fail(ErrorKind::domain, where, "layer index " + std::to_string(layer_index) + " must name a non-prism layer");
  }
  if (!std::isfinite(target_shift_ru)) fail(ErrorKind::domain, where, "target shift must be finite");
  const Complex eps_c = stack[layer_index].permittivity;
  if (eps_c.imag() != 0.0 || !(eps_c.real() > 0.0)) {
    fail(ErrorKind::domain, where, "inverted layer must have a real, positive permittivity");
  }
  const double eps0 = eps_c.real();
  const double width = options.bracket_width;

  auto perturbed = [&](double delta_eps) { return stack.with_permittivity(layer_index, Complex(eps0 + delta_eps, 0.0)); };
  const auto bracket = resonance::merge(resonance::default_bracket(stack), resonance::default_bracket(perturbed(width)));
  auto theta_of = [&](double delta_eps, const resonance::AngleBracket& b) {
    return resonance::find_spr_angle(perturbed(delta_eps), wavelength_nm, b, options.resonance);
  };
  auto theta_own = [&](double delta_eps) {
    return resonance::find_spr_angle(perturbed(delta_eps), wavelength_nm, options.resonance);
  };

  const double theta0 = resonance::find_spr_angle(stack, wavelength_nm, options.resonance);
  if (target_shift_ru == 0.0) return {0.0, 0.0, 0.0, 0};

  // Probe grid: monotonic check and a tight bracket for the refinement.
  const int probes = std::max(options.monotonic_probes, 1);
  std::vector<double> probe_eps(static_cast<std::size_t>(probes) + 1);
  std::vector<double> probe_shift(probe_eps.size());
  for (std::size_t j = 0; j < probe_eps.size(); ++j) {
    probe_eps[j] = width * static_cast<double>(j) / probes;
    probe_shift[j] = j == 0 ? 0.0 : resonance::angle_shift_to_ru(theta_own(probe_eps[j]) - theta0);
  }
  const bool increasing = probe_shift.back() > 0.0;
  for (std::size_t j = 1; j < probe_shift.size(); ++j) {
    if (increasing ? !(probe_shift[j] > probe_shift[j - 1]) : !(probe_shift[j] < probe_shift[j - 1])) {
      fail(ErrorKind::ambiguity, where, "forward map is not monotonic on the search bracket");
    }
  }
  const double lo_shift = std::min(probe_shift.front(), probe_shift.back());
  const double hi_shift = std::max(probe_shift.front(), probe_shift.back());
  if (target_shift_ru < lo_shift || target_shift_ru > hi_shift) {
    fail(ErrorKind::range, where,
         "target " + std::to_string(target_shift_ru) + " RU outside achievable range [" + std::to_string(lo_shift) + ", " +
             std::to_string(hi_shift) + "] RU");
  }

  std::size_t seg = 1;
  while (seg + 1 < probe_shift.size() &&
         (increasing ? probe_shift[seg] < target_shift_ru : probe_shift[seg] > target_shift_ru)) {
    ++seg;
  }
  const double a = probe_eps[seg - 1];
  const double b = probe_eps[seg];
  const double fa = probe_shift[seg - 1] - target_shift_ru;
  const double fb = probe_shift[seg] - target_shift_ru;

  // Angles for this segment lie between the probe angles; pad by the coarse step.
  const double theta_a = theta0 + resonance::ru_to_angle_shift(probe_shift[seg - 1]);
  const double theta_b = theta0 + resonance::ru_to_angle_shift(probe_shift[seg]);
  const double pad = 5.0 * options.resonance.coarse_step_deg;
  const resonance::AngleBracket local{std::max(bracket.lo_deg, std::min(theta_a, theta_b) - pad),
                                      std::min(bracket.hi_deg, std::max(theta_a, theta_b) + pad)};

  auto residual = [&](double delta_eps) {
    return resonance::angle_shift_to_ru(theta_of(delta_eps, local) - theta0) - target_shift_ru;
  };
  const auto root = find_root_bracketed(residual, a, b, fa, fb,
                                        RootTolerance{options.eps_tolerance, 0.0, options.max_iterations});
  if (!root || !root->converged || std::abs(root->value) > options.shift_tolerance_ru) {
    fail(ErrorKind::convergence, where, "inversion did not converge to the target shift");
  }
  return {root->x, epsilon_delta_to_n_delta(eps0, root->x), root->value + target_shift_ru, root->iterations};
}

struct ConcentrationPoint {
  double conc_mg_ml;
  double shift_ru;
};

struct ConcentrationSeries {
  std::vector<ConcentrationPoint> points;
  double buffer_index;
};

inline void validate(const ConcentrationSeries& series) {
  const std::string where = "inversion::ConcentrationSeries";
  if (series.points.size() < 2) fail(ErrorKind::fit, where, "need at least two concentration points");
  if (!(series.buffer_index > 0.0)) fail(ErrorKind::domain, where, "buffer refractive index must be positive");
  std::set<double> seen;
  for (const auto& p : series.points) {
    if (!std::isfinite(p.conc_mg_ml) || !std::isfinite(p.shift_ru)) fail(ErrorKind::validation, where, "non-finite value");
    if (p.conc_mg_ml < 0.0) fail(ErrorKind::validation, where, "concentrations must be non-negative");
    if (!seen.insert(p.conc_mg_ml).second) fail(ErrorKind::validation, where, "concentrations must be distinct");
  }
}

/// Reads `conc_mg_ml,shift_ru` CSV.
inline ConcentrationSeries parse_concentration_series(std::istream& in, double buffer_index) {
  const std::string where = "inversion::parse_concentration_series";
  ConcentrationSeries series{{}, buffer_index};
  csv::read_csv(in, "conc_mg_ml,shift_ru", where, [&](const auto& fields, std::size_t line_no) {
    if (fields.size() != 2) csv::parse_fail(where, line_no, "expected 2 fields, got " + std::to_string(fields.size()));
    const auto c = csv::parse_double(fields[0]);
    const auto r = csv::parse_double(fields[1]);
    if (!c) csv::parse_fail(where, line_no, "invalid concentration '" + std::string(fields[0]) + "'");
    if (!r) csv::parse_fail(where, line_no, "invalid shift '" + std::string(fields[1]) + "'");
    series.points.push_back({*c, *r});
  });
  return series;
}

struct IncrementFit {
  double dn_dc;         // (mg/ml)^-1
  double deps_dc;       // (mg/ml)^-1, defined as 2 n_buffer dn_dc
  double dn_dc_stderr;  // (mg/ml)^-1
  double intercept_ru;  // intercept of the raw shift-vs-concentration line
  double intercept_dn;  // intercept of the delta_n-vs-concentration line
  std::vector<double> delta_n;
};

/// Inverts every (c, shift) point to delta_n and regresses delta_n on c with a free intercept.
inline IncrementFit fit_refractive_increment(const ConcentrationSeries& series, const LayerStack& stack,
                                             double wavelength_nm, std::size_t layer_index,
                                             const InversionOptions& options = {}) {
  const std::string where = "inversion::fit_refractive_increment";
  validate(series);

  std::vector<double> conc, shift, dn;
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& p = series.points[i];
    try {
      dn.push_back(invert_shift_to_epsilon(stack, wavelength_nm, layer_index, p.shift_ru, options).delta_n);
    } catch (const Error& e) {
      fail(e.kind(), where,
           "point " + std::to_string(i + 1) + " (c=" + std::to_string(p.conc_mg_ml) + " mg/ml, " +
               std::to_string(p.shift_ru) + " RU): " + e.what());
    }
    conc.push_back(p.conc_mg_ml);
    shift.push_back(p.shift_ru);
  }

  const LinearFit n_fit = fit_line(conc, dn);
  const LinearFit ru_fit = fit_line(conc, shift);
  return {n_fit.slope, 2.0 * series.buffer_index * n_fit.slope, n_fit.slope_stderr, ru_fit.intercept, n_fit.intercept,
          std::move(dn)};
}

}  // namespace spr::inversion
