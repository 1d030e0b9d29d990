#pragma once

// Hand-rolled random generators for the property tests. Seeds are fixed so
// every run sees the same cases.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "spr/layer.hpp"
#include "spr/sensogram.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Passive permittivity with 0.1 <= |eps| <= max_abs and Im(eps) >= 0.
inline spr::Complex passive_permittivity(Rng& rng, double max_abs = 20.0) {
  const double mag = uniform(rng, 0.1, max_abs);
  const double phase = uniform(rng, 0.0, std::numbers::pi);
  return std::polar(mag, phase);
}

struct StackLimits {
  std::size_t min_layers = 2;
  std::size_t max_layers = 8;
  double max_abs_eps = 20.0;
  double max_thickness_nm = 500.0;
};

inline spr::LayerStack passive_stack(Rng& rng, const StackLimits& lim = {}) {
  const auto n = std::uniform_int_distribution<std::size_t>(lim.min_layers, lim.max_layers)(rng);
  std::vector<spr::Layer> layers;
  layers.push_back(spr::Layer::bulk("prism", {uniform(rng, 1.0, lim.max_abs_eps), 0.0}));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    layers.push_back(spr::Layer::film("film" + std::to_string(i), passive_permittivity(rng, lim.max_abs_eps),
                                      uniform(rng, 0.0, lim.max_thickness_nm)));
  }
  layers.push_back(spr::Layer::bulk("substrate", passive_permittivity(rng, lim.max_abs_eps)));
  return spr::LayerStack(std::move(layers));
}

/// Irregularly sampled series on [t0, t1].
inline spr::sensogram::SensogramSeries random_series(Rng& rng, std::string channel, std::size_t n, double t0, double t1) {
  std::vector<double> times;
  for (std::size_t i = 0; i < n; ++i) times.push_back(uniform(rng, t0, t1));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  spr::sensogram::SensogramSeries s{std::move(channel), {}};
  for (const double t : times) s.samples.push_back({t, uniform(rng, -500.0, 5000.0)});
  return s;
}

}  // namespace gen
