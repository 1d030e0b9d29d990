#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spr/constants.hpp"
#include "spr/error.hpp"

namespace spr {

/// Complex relative permittivity. Absorbing media carry a positive imaginary part.
using Complex = std::complex<double>;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// One optical layer. An empty thickness marks a semi-infinite medium.
struct Layer {
  std::string name;
  Complex permittivity{1.0, 0.0};
  std::optional<double> thickness_nm;

  bool semi_infinite() const { return !thickness_nm.has_value(); }

  static Layer bulk(std::string name, Complex eps) { return {std::move(name), eps, std::nullopt}; }
  static Layer film(std::string name, Complex eps, double thickness_nm) {
    return {std::move(name), eps, thickness_nm};
  }
};

/**
 * Ordered layers from the incidence medium (prism, index 0) to the final
 * semi-infinite medium (index size()-1).
 *
 * Invariants checked on construction:
 *  - at least two layers, the first and last semi-infinite;
 *  - every interior layer has a finite, non-negative thickness;
 *  - all permittivities finite;
 *  - the prism permittivity is real and positive.
 */
class LayerStack {
 public:
  explicit LayerStack(std::vector<Layer> layers) : layers_(std::move(layers)) { validate(); }

  std::size_t size() const noexcept { return layers_.size(); }
  const Layer& operator[](std::size_t i) const { return layers_[i]; }
  const Layer& front() const { return layers_.front(); }
  const Layer& back() const { return layers_.back(); }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  auto begin() const { return layers_.begin(); }
  auto end() const { return layers_.end(); }

  double prism_permittivity() const { return layers_.front().permittivity.real(); }

  LayerStack with_permittivity(std::size_t index, Complex eps) const {
    check_index(index, "with_permittivity");
    auto copy = layers_;
    copy[index].permittivity = eps;
    return LayerStack(std::move(copy));
  }

  LayerStack with_thickness(std::size_t index, double thickness_nm) const {
    check_index(index, "with_thickness");
    if (index == 0 || index + 1 == layers_.size()) {
      fail(ErrorKind::domain, "optics_core::LayerStack",
           "cannot give a finite thickness to a bounding semi-infinite layer");
    }
    auto copy = layers_;
    copy[index].thickness_nm = thickness_nm;
    return LayerStack(std::move(copy));
  }

  /// Inserts `layer` so that it ends up at position `index`.
  LayerStack with_inserted(std::size_t index, Layer layer) const {
    if (index == 0 || index >= layers_.size()) {
      fail(ErrorKind::domain, "optics_core::LayerStack", "insertion index must be interior");
    }
    auto copy = layers_;
    copy.insert(copy.begin() + static_cast<std::ptrdiff_t>(index), std::move(layer));
    return LayerStack(std::move(copy));
  }

  friend bool operator==(const LayerStack& a, const LayerStack& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].name != b[i].name || a[i].permittivity != b[i].permittivity ||
          a[i].thickness_nm != b[i].thickness_nm) {
        return false;
      }
    }
    return true;
  }

 private:
  void check_index(std::size_t index, const char* op) const {
    if (index >= layers_.size()) {
      fail(ErrorKind::domain, std::string("optics_core::LayerStack::") + op,
           "layer index " + std::to_string(index) + " out of range");
    }
  }

  void validate() const {
    const std::string where = "optics_core::LayerStack";
    if (layers_.size() < 2) fail(ErrorKind::validation, where, "a stack needs at least two layers");
    if (!layers_.front().semi_infinite() || !layers_.back().semi_infinite()) {
      fail(ErrorKind::validation, where, "first and last layers must be semi-infinite");
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& layer = layers_[i];
      if (!is_finite(layer.permittivity)) {
        fail(ErrorKind::validation, where, "layer " + std::to_string(i) + " has a non-finite permittivity");
      }
      if (i == 0 || i + 1 == layers_.size()) continue;
      if (layer.semi_infinite()) {
        fail(ErrorKind::validation, where, "interior layer " + std::to_string(i) + " must have finite thickness");
      }
      if (!std::isfinite(*layer.thickness_nm) || *layer.thickness_nm < 0.0) {
        fail(ErrorKind::validation, where, "layer " + std::to_string(i) + " has an invalid thickness");
      }
    }
    const auto prism = layers_.front().permittivity;
    if (prism.imag() != 0.0 || !(prism.real() > 0.0)) {
      fail(ErrorKind::validation, where, "prism permittivity must be real and positive");
    }
  }

  std::vector<Layer> layers_;
};

/// Vacuum wavelength and angle of incidence. Angles are stored in radians.
class OpticalContext {
 public:
  OpticalContext(double wavelength_nm, double incidence_rad)
      : wavelength_nm_(wavelength_nm), incidence_rad_(incidence_rad) {
    if (!(wavelength_nm > 0.0) || !std::isfinite(wavelength_nm)) {
      fail(ErrorKind::domain, "optics_core::OpticalContext", "wavelength must be positive");
    }
    if (!(incidence_rad >= 0.0) || !(incidence_rad < constants::pi / 2)) {
      fail(ErrorKind::domain, "optics_core::OpticalContext", "incidence angle must lie in [0, 90) degrees");
    }
  }

  static OpticalContext from_degrees(double wavelength_nm, double incidence_deg) {
    return {wavelength_nm, incidence_deg * constants::radians_per_degree};
  }

  double wavelength_nm() const noexcept { return wavelength_nm_; }
  double incidence_rad() const noexcept { return incidence_rad_; }
  double incidence_deg() const noexcept { return incidence_rad_ / constants::radians_per_degree; }

 private:
  double wavelength_nm_;
  double incidence_rad_;
};

}  // namespace spr
