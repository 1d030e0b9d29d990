#pragma once

#include <numbers>

/// Physical constants and unit conversions used across the toolkit.
/// Each entry notes where its value comes from.
namespace spr::constants {

/// One resonance unit is 1e-4 degrees of SPR-angle shift (instrument convention).
inline constexpr double ru_per_degree = 1.0e4;
inline constexpr double degrees_per_ru = 1.0e-4;

/// Mass calibration: 1 ng/mm^2 of immobilized protein reads as 1000 RU.
inline constexpr double ru_per_ng_per_mm2 = 1000.0;

/// Avogadro constant to six significant figures (mol^-1).
inline constexpr double avogadro = 6.02214e23;

inline constexpr double grams_per_ng = 1.0e-9;
inline constexpr double grams_per_mol_per_kda = 1.0e3;
inline constexpr double nm2_per_mm2 = 1.0e12;
inline constexpr double nm2_per_angstrom2 = 1.0e-2;

inline constexpr double pi = std::numbers::pi;
inline constexpr double radians_per_degree = pi / 180.0;

}  // namespace spr::constants
