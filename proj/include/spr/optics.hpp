#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "spr/constants.hpp"
#include "spr/error.hpp"
#include "spr/layer.hpp"

/// p-polarized reflectance of a planar multilayer via the input-impedance recursion.
///
/// Wavenumbers are in rad/nm and thicknesses in nm. Impedances drop the common
/// vacuum factor, so Z_m = k_z,m / (eps_m k0) is dimensionless.
namespace spr::optics {

/// |tan(k_z d)| above which the recursion switches to its analytic limit.
inline constexpr double tan_overflow_guard = 1.0e12;
inline constexpr double singular_denominator = 1.0e-30;

inline double vacuum_wavenumber(double wavelength_nm) {
  if (!(wavelength_nm > 0.0) || !std::isfinite(wavelength_nm)) {
    fail(ErrorKind::domain, "optics_core::vacuum_wavenumber", "wavelength must be positive");
  }
  return 2.0 * constants::pi / wavelength_nm;
}

inline double tangential_wavevector(double k0, double prism_eps, double theta_rad) {
  if (prism_eps < 0.0 || !std::isfinite(prism_eps)) {
    fail(ErrorKind::domain, "optics_core::tangential_wavevector", "prism permittivity must be non-negative");
  }
  return k0 * std::sqrt(prism_eps) * std::sin(theta_rad);
}

/// Square root of eps k0^2 - k^2 on the branch Im >= 0 (Re >= 0 when purely real),
/// so fields decay or propagate away from the interface.
inline Complex normal_wavevector(Complex eps, double k0, double k) {
  const Complex kz = std::sqrt(eps * (k0 * k0) - Complex(k * k, 0.0));
  if (kz.imag() < 0.0 || (kz.imag() == 0.0 && kz.real() < 0.0)) return -kz;
  return kz;
}

inline Complex layer_impedance(Complex eps, Complex kz, double k0) {
  if (eps == Complex(0.0, 0.0)) {
    fail(ErrorKind::singularity, "optics_core::layer_impedance", "zero permittivity");
  }
  return kz / (eps * k0);
}

namespace detail {

struct LayerWave {
  Complex kz;
  Complex impedance;
};

inline LayerWave layer_wave(const Layer& layer, double k0, double k) {
  const Complex kz = normal_wavevector(layer.permittivity, k0, k);
  return {kz, layer_impedance(layer.permittivity, kz, k0)};
}

}  // namespace detail

/// Input impedance seen from the prism at the top of layer index 1.
inline Complex input_impedance(const LayerStack& stack, const OpticalContext& ctx) {
  const double k0 = vacuum_wavenumber(ctx.wavelength_nm());
  const double k = tangential_wavevector(k0, stack.prism_permittivity(), ctx.incidence_rad());

  const std::size_t n = stack.size();
  Complex z_in = detail::layer_wave(stack[n - 1], k0, k).impedance;

  for (std::size_t m = n - 1; m-- > 1;) {
    const auto [kz, z] = detail::layer_wave(stack[m], k0, k);
    const Complex t = std::tan(kz * *stack[m].thickness_nm);
    if (!is_finite(t) || std::abs(t) > tan_overflow_guard) {
      if (std::abs(z_in) < singular_denominator) {
        fail(ErrorKind::singularity, "optics_core::input_impedance",
             "vanishing impedance below layer " + std::to_string(m));
      }
      z_in = z * z / z_in;
      continue;
    }
    const Complex den = z - Complex(0.0, 1.0) * z_in * t;
    if (std::abs(den) < singular_denominator) {
      fail(ErrorKind::singularity, "optics_core::input_impedance",
           "singular recursion denominator at layer " + std::to_string(m));
    }
    z_in = z * (z_in - Complex(0.0, 1.0) * z * t) / den;
  }
  return z_in;
}

/// Intensity reflectance. Not clamped: passive stacks stay within [0, 1 + 1e-9].
inline double reflectance(const LayerStack& stack, const OpticalContext& ctx) {
  const double k0 = vacuum_wavenumber(ctx.wavelength_nm());
  const double k = tangential_wavevector(k0, stack.prism_permittivity(), ctx.incidence_rad());
  const Complex z1 = detail::layer_wave(stack.front(), k0, k).impedance;
  const Complex z_in = input_impedance(stack, ctx);
  const Complex sum = z_in + z1;
  if (std::abs(sum) < singular_denominator) {
    fail(ErrorKind::singularity, "optics_core::reflectance", "Z_in + Z_1 vanishes");
  }
  return std::norm((z_in - z1) / sum);
}

/// Analytic p-polarized Fresnel reflectance between two semi-infinite media.
inline double fresnel_reflectance_p(Complex eps1, Complex eps2, double k0, double k) {
  const Complex kz1 = normal_wavevector(eps1, k0, k);
  const Complex kz2 = normal_wavevector(eps2, k0, k);
  const Complex r = (eps2 * kz1 - eps1 * kz2) / (eps2 * kz1 + eps1 * kz2);
  return std::norm(r);
}

/// Critical angle (degrees) of the prism against the final medium, if total
/// internal reflection exists for it.
inline std::optional<double> critical_angle_deg(const LayerStack& stack) {
  const double ratio = stack.back().permittivity.real() / stack.prism_permittivity();
  if (!(ratio > 0.0) || ratio >= 1.0) return std::nullopt;
  return std::asin(std::sqrt(ratio)) / constants::radians_per_degree;
}

}  // namespace spr::optics
