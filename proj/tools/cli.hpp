#pragma once

// Command-line driver. Kept in a header so tests can call run() in-process.

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "spr/spr.hpp"

namespace spr::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_parse = 2,
  exit_domain = 3,
  exit_convergence = 4,
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io:
    case ErrorKind::parse:
    case ErrorKind::validation:
      return exit_parse;
    case ErrorKind::bracket:
    case ErrorKind::ambiguity:
    case ErrorKind::convergence:
    case ErrorKind::perturbation:
      return exit_convergence;
    default:
      return exit_domain;
  }
}

/// Writes `content` to `path` through a temporary file and rename, so the
/// destination only ever holds complete output.
inline void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cli::run", "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::io, "cli::run", "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::io, "cli::run", "cannot move output into '" + path + "'");
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cli::run", "cannot open input file '" + path + "'");
  return in;
}

/// Layer numbering on the command line is 1-based, prism = 1.
inline std::size_t layer_from_flag(const LayerStack& stack, std::optional<std::size_t> flag) {
  if (!flag) return resonance::default_sample_index(stack);
  if (*flag < 2 || *flag > stack.size()) {
    fail(ErrorKind::domain, "cli::run",
         "--layer must be between 2 and " + std::to_string(stack.size()) + " (1 is the prism)");
  }
  return *flag - 1;
}

inline std::optional<sensogram::TimeWindow> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return std::nullopt;
  const auto a = csv::parse_double(std::string_view(text).substr(0, colon));
  const auto b = csv::parse_double(std::string_view(text).substr(colon + 1));
  if (!a || !b || !(*a <= *b)) return std::nullopt;
  return sensogram::TimeWindow{*a, *b};
}

struct Options {
  std::string stack_path;
  std::string after_path;
  std::string input_path;
  std::string events_path;
  std::string output_path;
  double wavelength_nm = 633.0;
  std::optional<std::size_t> layer;

  std::optional<double> start_deg, end_deg;
  double step_deg = 0.01;
  std::optional<double> lo_deg, hi_deg;

  double dn = 1e-4;
  double delta_eps = 1e-3;
  double slab_nm = 2.0;
  std::vector<double> depths_nm;

  double target_ru = 0.0;
  double bracket_width = 0.2;
  std::optional<double> n_buffer;

  std::string signal_channel, reference_channel;
  double delay_s = 0.5;
  double baseline_span_s = 20.0;
  double plateau_span_s = 20.0;
  std::vector<std::string> exclude;

  std::optional<double> ru, area_mm2, mw_kda, footprint_nm2;
  std::vector<double> dims_angstrom;
};

namespace detail {

inline std::string header_line(std::initializer_list<std::string_view> cols) {
  std::string out;
  for (const auto c : cols) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + "\n";
}

inline std::string row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + "\n";
}

using csv::format;

inline std::string cmd_curve(const Options& o) {
  const auto stack = stack_io::load_stack(o.stack_path);
  const auto bracket = resonance::default_bracket(stack);
  const resonance::AngleSweep sweep{o.start_deg.value_or(bracket.lo_deg), o.end_deg.value_or(bracket.hi_deg), o.step_deg};
  const auto curve = resonance::spr_curve(stack, o.wavelength_nm, sweep);
  std::string out = header_line({"angle_deg", "reflectance"});
  for (const auto& p : curve.points) out += row({format(p.angle_deg), format(p.reflectance)});
  if (curve.has_resonance()) {
    out += "# resonance_row=" + std::to_string(*curve.resonance_row + 1) +
           ", resonance_angle_deg=" + format(*curve.resonance_angle_deg) +
           ", resonance_reflectance=" + format(*curve.resonance_reflectance) + "\n";
  } else {
    out += "# resonance=absent\n";
  }
  return out;
}

inline std::string cmd_angle(const Options& o) {
  const auto stack = stack_io::load_stack(o.stack_path);
  auto bracket = resonance::default_bracket(stack);
  if (o.lo_deg) bracket.lo_deg = *o.lo_deg;
  if (o.hi_deg) bracket.hi_deg = *o.hi_deg;
  const double theta = resonance::find_spr_angle(stack, o.wavelength_nm, bracket);
  return header_line({"resonance_angle_deg", "reflectance"}) +
         row({format(theta), format(resonance::reflectance_at(stack, o.wavelength_nm, theta))});
}

inline std::string cmd_sensitivity(const Options& o) {
  const auto stack = stack_io::load_stack(o.stack_path);
  const auto layer = layer_from_flag(stack, o.layer);
  const double s = resonance::bulk_sensitivity(stack, o.wavelength_nm, layer, o.dn);
  return header_line({"layer", "sensitivity_ru_per_riu", "riu_per_ru"}) +
         row({std::to_string(layer + 1), format(s), format(1.0 / s)});
}

inline std::string cmd_depth(const Options& o) {
  const auto stack = stack_io::load_stack(o.stack_path);
  const auto layer = layer_from_flag(stack, o.layer);
  const double theta = resonance::find_spr_angle(stack, o.wavelength_nm);
  const double dp = resonance::penetration_depth_analytic(stack, o.wavelength_nm, layer);
  return header_line({"layer", "resonance_angle_deg", "analytic_dp_nm"}) +
         row({std::to_string(layer + 1), format(theta), format(dp)});
}

inline std::string cmd_profile(const Options& o) {
  const auto stack = stack_io::load_stack(o.stack_path);
  const auto layer = layer_from_flag(stack, o.layer);
  resonance::SensitivityProbe probe{o.delta_eps, o.slab_nm, o.depths_nm};
  if (probe.depths_nm.empty()) probe.depths_nm = resonance::depth_grid(0.0, 200.0, 20.0);
  const auto report = resonance::sensitivity_profile(stack, o.wavelength_nm, probe, layer);
  std::string out = header_line({"depth_nm", "shift_ru"});
  for (const auto& p : report.profile) out += row({format(p.depth_nm), format(p.shift_ru)});
  out += "# analytic_dp_nm=" + format(report.analytic_dp_nm) + ", fitted_dp_nm=" + format(report.fitted_dp_nm) +
         ", r2=" + format(report.fit_r_squared) + "\n";
  return out;
}

inline std::string cmd_shift(const Options& o) {
  const auto before = stack_io::load_stack(o.stack_path);
  const auto after = stack_io::load_stack(o.after_path);
  const auto shift = resonance::scenario_shift(before, after, o.wavelength_nm);
  return header_line({"delta_deg", "delta_ru"}) + row({format(shift.delta_degrees), format(shift.delta_ru)});
}

inline std::string cmd_invert(const Options& o) {
  const auto stack = stack_io::load_stack(o.stack_path);
  const auto layer = layer_from_flag(stack, o.layer);
  inversion::InversionOptions opts;
  opts.bracket_width = o.bracket_width;
  const auto r = inversion::invert_shift_to_epsilon(stack, o.wavelength_nm, layer, o.target_ru, opts);
  return header_line({"target_ru", "delta_eps", "delta_n", "achieved_ru", "iterations"}) +
         row({format(o.target_ru), format(r.delta_eps), format(r.delta_n), format(r.achieved_shift_ru),
              std::to_string(r.iterations)});
}

inline std::string cmd_fit_dndc(const Options& o) {
  const auto stack = stack_io::load_stack(o.stack_path);
  const auto layer = layer_from_flag(stack, o.layer);
  const double n_buffer = o.n_buffer.value_or(std::sqrt(stack[layer].permittivity.real()));
  auto in = open_input(o.input_path);
  const auto series = inversion::parse_concentration_series(in, n_buffer);
  const auto fit = inversion::fit_refractive_increment(series, stack, o.wavelength_nm, layer);
  return header_line({"dn_dc", "dn_dc_stderr", "deps_dc", "intercept_ru"}) +
         row({format(fit.dn_dc), format(fit.dn_dc_stderr), format(fit.deps_dc), format(fit.intercept_ru)});
}

inline const sensogram::SensogramSeries& pick_channel(const std::vector<sensogram::SensogramSeries>& all,
                                                      const std::string& name) {
  for (const auto& s : all) {
    if (s.channel == name) return s;
  }
  fail(ErrorKind::validation, "cli::run", "channel '" + name + "' not found in sensogram");
}

inline std::string cmd_sensogram(const Options& o) {
  auto in = open_input(o.input_path);
  const auto all = sensogram::parse_sensogram(in);
  if (all.empty()) fail(ErrorKind::validation, "cli::run", "sensogram holds no samples");
  std::vector<sensogram::InjectionEvent> events;
  if (!o.events_path.empty()) {
    auto ev = open_input(o.events_path);
    events = sensogram::parse_events(ev);
  }
  std::vector<sensogram::TimeWindow> excluded;
  for (const auto& text : o.exclude) {
    const auto w = parse_window(text);
    if (!w) fail(ErrorKind::parse, "cli::run", "invalid --exclude window '" + text + "', expected START:END");
    excluded.push_back(*w);
  }

  const auto& signal = o.signal_channel.empty() ? all.front() : pick_channel(all, o.signal_channel);
  const auto series = o.reference_channel.empty()
                          ? signal
                          : sensogram::subtract_reference(signal, pick_channel(all, o.reference_channel), o.delay_s);

  if (events.empty()) {
    std::string out = header_line({"time_s", "channel", "response_ru"});
    for (const auto& s : series.samples) out += row({format(s.time_s), series.channel, format(s.response_ru)});
    return out;
  }

  std::string out = header_line({"label", "conc_mg_ml", "baseline_ru", "plateau_ru", "delta_ru", "baseline_start_s",
                                  "baseline_end_s", "plateau_start_s", "plateau_end_s"});
  for (const auto& event : events) {
    const sensogram::TimeWindow baseline{event.t_start_s - o.baseline_span_s, event.t_start_s};
    const sensogram::TimeWindow plateau{std::max(event.t_start_s, event.t_end_s - o.plateau_span_s), event.t_end_s};
    const auto step = sensogram::step_response(series, event, baseline, plateau, excluded);
    out += row({event.label, event.conc_mg_ml ? format(*event.conc_mg_ml) : std::string(), format(step.baseline_ru),
                format(step.plateau_ru), format(step.delta_ru), format(baseline.start_s), format(baseline.end_s),
                format(plateau.start_s), format(plateau.end_s)});
  }
  return out;
}

inline std::string cmd_coverage(const Options& o) {
  double footprint = 0.0;
  if (o.footprint_nm2) {
    footprint = *o.footprint_nm2;
  } else if (o.dims_angstrom.size() == 3) {
    footprint = sensogram::footprint_range({o.dims_angstrom[0], o.dims_angstrom[1], o.dims_angstrom[2]}).mean_nm2;
  } else {
    fail(ErrorKind::parse, "cli::run", "coverage needs --footprint or --dims A,B,C");
  }
  const auto r = sensogram::coverage_report(*o.ru, *o.area_mm2, *o.mw_kda, footprint);
  return header_line({"response_ru", "area_mm2", "mass_ng", "mw_kda", "molecules", "footprint_nm2", "monolayer",
                      "coverage"}) +
         row({format(r.response_ru, 10), format(r.area_mm2, 10), format(r.mass_ng, 10), format(r.molecular_weight_kda, 10),
              format(r.molecule_count, 10), format(r.footprint_nm2, 10), format(r.monolayer_capacity, 10),
              format(r.coverage_fraction, 10)});
}

}  // namespace detail

/// Runs one subcommand. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Surface plasmon resonance layered-media toolkit", "spr"};
  app.require_subcommand(1);
  Options o;

  auto add_stack = [&](CLI::App* cmd) {
    cmd->add_option("-s,--stack", o.stack_path, "Stack configuration file")->required();
    cmd->add_option("-w,--wavelength", o.wavelength_nm, "Vacuum wavelength in nm")->capture_default_str();
  };
  auto add_output = [&](CLI::App* cmd) { cmd->add_option("-o,--output", o.output_path, "Output CSV (default: stdout)"); };
  auto add_layer = [&](CLI::App* cmd) {
    cmd->add_option("-l,--layer", o.layer, "Layer number, 1 = prism (default: 4th layer or the final medium)");
  };

  auto* curve = app.add_subcommand("curve", "Reflectance versus angle with the resonance located");
  add_stack(curve);
  add_output(curve);
  curve->add_option("--start", o.start_deg, "First angle in degrees (default: critical angle + 0.1)");
  curve->add_option("--end", o.end_deg, "Last angle in degrees (default: critical angle + 15)");
  curve->add_option("--step", o.step_deg, "Angle step in degrees")->capture_default_str();

  auto* angle = app.add_subcommand("angle", "Locate the SPR angle");
  add_stack(angle);
  add_output(angle);
  angle->add_option("--lo", o.lo_deg, "Lower bracket bound in degrees");
  angle->add_option("--hi", o.hi_deg, "Upper bracket bound in degrees");

  auto* sens = app.add_subcommand("sensitivity", "Bulk refractive-index sensitivity in RU/RIU");
  add_stack(sens);
  add_output(sens);
  add_layer(sens);
  sens->add_option("--dn", o.dn, "Central-difference index step")->capture_default_str();

  auto* depth = app.add_subcommand("depth", "Analytic penetration depth of the sample layer");
  add_stack(depth);
  add_output(depth);
  add_layer(depth);

  auto* profile = app.add_subcommand("profile", "Depth-resolved sensitivity profile and fitted decay length");
  add_stack(profile);
  add_output(profile);
  add_layer(profile);
  profile->add_option("--delta-eps", o.delta_eps, "Slab permittivity increment")->capture_default_str();
  profile->add_option("--slab", o.slab_nm, "Slab thickness in nm")->capture_default_str();
  profile->add_option("--depths", o.depths_nm, "Comma-separated depths in nm (default 0,20,...,200)")->delimiter(',');

  auto* shift = app.add_subcommand("shift", "SPR shift between two stacks");
  add_stack(shift);
  add_output(shift);
  shift->add_option("--after", o.after_path, "Stack after the change")->required();

  auto* invert = app.add_subcommand("invert", "Convert a measured shift into delta-eps and delta-n");
  add_stack(invert);
  add_output(invert);
  add_layer(invert);
  invert->add_option("-t,--target", o.target_ru, "Measured shift in RU")->required();
  invert->add_option("--bracket-width", o.bracket_width, "Search width in permittivity")->capture_default_str();

  auto* fit = app.add_subcommand("fit-dndc", "Refractive-index increment from a concentration series");
  add_stack(fit);
  add_output(fit);
  add_layer(fit);
  fit->add_option("-i,--input", o.input_path, "CSV with header conc_mg_ml,shift_ru")->required();
  fit->add_option("--n-buffer", o.n_buffer, "Buffer refractive index (default: sqrt of the layer permittivity)");

  auto* sg = app.add_subcommand("sensogram", "Reference subtraction and step responses");
  add_output(sg);
  sg->add_option("-i,--input", o.input_path, "CSV with header time_s,channel,response_ru")->required();
  sg->add_option("--signal", o.signal_channel, "Signal channel (default: first channel)");
  sg->add_option("--reference", o.reference_channel, "Reference channel to subtract");
  sg->add_option("--delay", o.delay_s, "Reference delay in seconds")->capture_default_str();
  sg->add_option("--events", o.events_path, "CSV with header label,t_start_s,t_end_s,conc_mg_ml");
  sg->add_option("--baseline-span", o.baseline_span_s, "Seconds before each event used as baseline")->capture_default_str();
  sg->add_option("--plateau-span", o.plateau_span_s, "Seconds at the end of each event used as plateau")->capture_default_str();
  sg->add_option("--exclude", o.exclude, "Masked interval START:END in seconds (repeatable)");

  auto* cov = app.add_subcommand("coverage", "Mass, molecule count and surface coverage from a response");
  add_output(cov);
  cov->add_option("--ru", o.ru, "Immobilization response in RU")->required();
  cov->add_option("--area", o.area_mm2, "Sensing area in mm^2")->required();
  cov->add_option("--mw", o.mw_kda, "Molecular weight in kDa")->required();
  cov->add_option("--footprint", o.footprint_nm2, "Molecular footprint in nm^2");
  cov->add_option("--dims", o.dims_angstrom, "Molecule box dimensions A,B,C in angstrom")->delimiter(',')->expected(3);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "spr: " << e.what() << "\n";
    return exit_parse;
  }

  try {
    std::string content;
    if (curve->parsed()) content = detail::cmd_curve(o);
    else if (angle->parsed()) content = detail::cmd_angle(o);
    else if (sens->parsed()) content = detail::cmd_sensitivity(o);
    else if (depth->parsed()) content = detail::cmd_depth(o);
    else if (profile->parsed()) content = detail::cmd_profile(o);
    else if (shift->parsed()) content = detail::cmd_shift(o);
    else if (invert->parsed()) content = detail::cmd_invert(o);
    else if (fit->parsed()) content = detail::cmd_fit_dndc(o);
    else if (sg->parsed()) content = detail::cmd_sensogram(o);
    else if (cov->parsed()) content = detail::cmd_coverage(o);

    if (o.output_path.empty()) {
      out << content;
    } else {
      write_atomically(o.output_path, content);
    }
    return exit_ok;
  } catch (const Error& e) {
    err << "spr: " << to_string(e.kind()) << " in " << e.where() << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace spr::cli
