#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spr/constants.hpp"
#include "spr/csv.hpp"
#include "spr/error.hpp"

/// Sensogram reduction: reference subtraction, window levels, step
/// responses, and RU -> mass / molecule count / surface coverage.
namespace spr::sensogram {

struct Sample {
  double time_s;
  double response_ru;
};

struct SensogramSeries {
  std::string channel;
  std::vector<Sample> samples;
};

struct TimeWindow {
  double start_s;
  double end_s;

  bool contains(double t) const { return t >= start_s && t <= end_s; }
};

struct InjectionEvent {
  std::string label;
  double t_start_s;
  double t_end_s;
  std::optional<double> conc_mg_ml;
};

inline void validate(const SensogramSeries& series) {
  const std::string where = "sensogram::SensogramSeries";
  if (series.samples.size() < 2) {
    fail(ErrorKind::validation, where, "channel '" + series.channel + "' needs at least two samples");
  }
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    const auto& s = series.samples[i];
    if (!std::isfinite(s.time_s) || !std::isfinite(s.response_ru)) {
      fail(ErrorKind::validation, where, "channel '" + series.channel + "' has a non-finite sample");
    }
    if (i > 0 && !(s.time_s > series.samples[i - 1].time_s)) {
      fail(ErrorKind::validation, where, "channel '" + series.channel + "' timestamps are not strictly increasing");
    }
  }
}

namespace detail {

using csv::parse_double;
using csv::split;
using csv::trim;
using csv::parse_fail;
using csv::read_csv;

}  // namespace detail

/// Parses `time_s,channel,response_ru` CSV into one series per channel, in
/// order of first appearance, each sorted by time.
inline std::vector<SensogramSeries> parse_sensogram(std::istream& in) {
  const std::string where = "sensogram::parse_sensogram";
  std::vector<SensogramSeries> out;
  detail::read_csv(in, "time_s,channel,response_ru", where, [&](const auto& fields, std::size_t line_no) {
    if (fields.size() != 3) detail::parse_fail(where, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    const auto t = detail::parse_double(fields[0]);
    const auto r = detail::parse_double(fields[2]);
    if (!t) detail::parse_fail(where, line_no, "invalid time '" + std::string(fields[0]) + "'");
    if (!r) detail::parse_fail(where, line_no, "invalid response '" + std::string(fields[2]) + "'");
    if (fields[1].empty()) detail::parse_fail(where, line_no, "empty channel label");
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.channel == fields[1]; });
    if (it == out.end()) {
      out.push_back({std::string(fields[1]), {}});
      it = std::prev(out.end());
    }
    it->samples.push_back({*t, *r});
  });

  for (auto& series : out) {
    std::stable_sort(series.samples.begin(), series.samples.end(),
                     [](const Sample& a, const Sample& b) { return a.time_s < b.time_s; });
    for (std::size_t i = 1; i < series.samples.size(); ++i) {
      if (series.samples[i].time_s == series.samples[i - 1].time_s) {
        fail(ErrorKind::validation, where,
             "duplicate timestamp " + std::to_string(series.samples[i].time_s) + " s in channel '" + series.channel + "'");
      }
    }
    validate(series);
  }
  return out;
}

/// Parses `label,t_start_s,t_end_s,conc_mg_ml` CSV; the concentration may be empty.
inline std::vector<InjectionEvent> parse_events(std::istream& in) {
  const std::string where = "sensogram::parse_events";
  std::vector<InjectionEvent> out;
  detail::read_csv(in, "label,t_start_s,t_end_s,conc_mg_ml", where, [&](const auto& fields, std::size_t line_no) {
    if (fields.size() != 4) detail::parse_fail(where, line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    const auto t0 = detail::parse_double(fields[1]);
    const auto t1 = detail::parse_double(fields[2]);
    if (!t0 || !t1) detail::parse_fail(where, line_no, "invalid event time");
    if (!(*t0 < *t1)) detail::parse_fail(where, line_no, "event start must precede its end");
    std::optional<double> conc;
    if (!fields[3].empty()) {
      conc = detail::parse_double(fields[3]);
      if (!conc || *conc < 0.0) detail::parse_fail(where, line_no, "invalid concentration '" + std::string(fields[3]) + "'");
    }
    out.push_back({std::string(fields[0]), *t0, *t1, conc});
  });
  return out;
}

/// Linear interpolation of a series at time t, which must lie within its range.
inline double interpolate(const SensogramSeries& series, double t) {
  const auto& s = series.samples;
  auto it = std::lower_bound(s.begin(), s.end(), t, [](const Sample& a, double v) { return a.time_s < v; });
  if (it == s.end()) return s.back().response_ru;
  if (it->time_s == t || it == s.begin()) return it->response_ru;
  const auto& hi = *it;
  const auto& lo = *std::prev(it);
  const double w = (t - lo.time_s) / (hi.time_s - lo.time_s);
  return lo.response_ru + w * (hi.response_ru - lo.response_ru);
}

/**
 * signal(t) - reference(t - delay) at each signal timestamp for which
 * t - delay falls inside the reference's time range. Other samples are dropped.
 */
inline SensogramSeries subtract_reference(const SensogramSeries& signal, const SensogramSeries& reference, double delay_s) {
  const std::string where = "sensogram::subtract_reference";
  validate(signal);
  validate(reference);
  if (!std::isfinite(delay_s)) fail(ErrorKind::domain, where, "delay must be finite");

  const double ref_lo = reference.samples.front().time_s;
  const double ref_hi = reference.samples.back().time_s;
  SensogramSeries out{signal.channel + "-" + reference.channel, {}};
  for (const auto& s : signal.samples) {
    const double t_ref = s.time_s - delay_s;
    if (t_ref < ref_lo || t_ref > ref_hi) continue;
    out.samples.push_back({s.time_s, s.response_ru - interpolate(reference, t_ref)});
  }
  if (out.samples.size() < 2) {
    fail(ErrorKind::alignment, where, "signal and delayed reference do not overlap in time");
  }
  return out;
}

struct WindowLevel {
  double mean_ru;
  double stddev_ru;  // sample standard deviation
  std::size_t count;
};

/// Mean (and spread) of the responses inside `window`, skipping any sample
/// that falls in one of the `excluded` intervals.
inline WindowLevel baseline_level(const SensogramSeries& series, const TimeWindow& window,
                                  const std::vector<TimeWindow>& excluded = {}) {
  const std::string where = "sensogram::baseline_level";
  if (!(window.start_s <= window.end_s)) fail(ErrorKind::window, where, "window start must not exceed its end");
  double sum = 0.0;
  std::size_t n = 0;
  auto masked = [&](double t) {
    return std::any_of(excluded.begin(), excluded.end(), [t](const TimeWindow& w) { return w.contains(t); });
  };
  for (const auto& s : series.samples) {
    if (window.contains(s.time_s) && !masked(s.time_s)) {
      sum += s.response_ru;
      ++n;
    }
  }
  if (n < 3) {
    fail(ErrorKind::window, where,
         "window [" + std::to_string(window.start_s) + ", " + std::to_string(window.end_s) + "] s holds " +
             std::to_string(n) + " samples, need at least 3");
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& s : series.samples) {
    if (window.contains(s.time_s) && !masked(s.time_s)) ss += (s.response_ru - mean) * (s.response_ru - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(n - 1)), n};
}

struct ResponseStep {
  double baseline_ru;
  double plateau_ru;
  double delta_ru;
  TimeWindow baseline_window;
  TimeWindow plateau_window;
};

inline ResponseStep step_response(const SensogramSeries& series, const InjectionEvent& event, const TimeWindow& baseline_window,
                                  const TimeWindow& plateau_window, const std::vector<TimeWindow>& excluded = {}) {
  const std::string where = "sensogram::step_response";
  if (!(event.t_start_s < event.t_end_s)) fail(ErrorKind::window, where, "event start must precede its end");
  if (plateau_window.start_s < event.t_start_s || plateau_window.end_s > event.t_end_s) {
    fail(ErrorKind::window, where, "plateau window must lie inside event '" + event.label + "'");
  }
  const double baseline = baseline_level(series, baseline_window, excluded).mean_ru;
  const double plateau = baseline_level(series, plateau_window, excluded).mean_ru;
  return {baseline, plateau, plateau - baseline, baseline_window, plateau_window};
}

inline double mass_from_response(double delta_ru, double area_mm2) {
  if (!(area_mm2 > 0.0)) fail(ErrorKind::domain, "sensogram::mass_from_response", "area must be positive");
  return delta_ru / constants::ru_per_ng_per_mm2 * area_mm2;
}

inline double molecule_count(double mass_ng, double molecular_weight_kda) {
  if (!(molecular_weight_kda > 0.0)) fail(ErrorKind::domain, "sensogram::molecule_count", "molecular weight must be positive");
  return mass_ng * constants::grams_per_ng * constants::avogadro / (molecular_weight_kda * constants::grams_per_mol_per_kda);
}

struct FootprintRange {
  double min_nm2;
  double max_nm2;
  double mean_nm2;  // mean of min and max
};

/// Face areas of a box with edge lengths in angstrom.
inline FootprintRange footprint_range(const std::array<double, 3>& dims_angstrom) {
  for (const double d : dims_angstrom) {
    if (!(d > 0.0)) fail(ErrorKind::domain, "sensogram::footprint_range", "dimensions must be positive");
  }
  const auto& [a, b, c] = dims_angstrom;
  const std::array<double, 3> faces{a * b * constants::nm2_per_angstrom2, a * c * constants::nm2_per_angstrom2,
                                    b * c * constants::nm2_per_angstrom2};
  const auto [lo, hi] = std::minmax_element(faces.begin(), faces.end());
  return {*lo, *hi, 0.5 * (*lo + *hi)};
}

inline double monolayer_capacity(double area_mm2, double footprint_nm2) {
  if (!(footprint_nm2 > 0.0)) fail(ErrorKind::domain, "sensogram::monolayer_capacity", "footprint must be positive");
  return area_mm2 * constants::nm2_per_mm2 / footprint_nm2;
}

struct CoverageReport {
  double response_ru;
  double area_mm2;
  double mass_ng;
  double molecular_weight_kda;
  double molecule_count;
  double footprint_nm2;
  double monolayer_capacity;
  double coverage_fraction;
};

inline CoverageReport coverage_report(double delta_ru, double area_mm2, double molecular_weight_kda, double footprint_nm2) {
  if (!(delta_ru >= 0.0)) fail(ErrorKind::domain, "sensogram::coverage_report", "response must be non-negative");
  const double mass = mass_from_response(delta_ru, area_mm2);
  const double count = molecule_count(mass, molecular_weight_kda);
  const double capacity = monolayer_capacity(area_mm2, footprint_nm2);
  return {delta_ru, area_mm2, mass, molecular_weight_kda, count, footprint_nm2, capacity, count / capacity};
}

}  // namespace spr::sensogram
