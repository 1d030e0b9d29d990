#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spr/csv.hpp"
#include "spr/error.hpp"
#include "spr/layer.hpp"

/// Stack configuration files: one layer per line, `name,eps_re,eps_im,thickness_nm`,
/// with the literal token `inf` marking the semi-infinite first and last layers.
/// `#` starts a comment; blank lines are ignored.
namespace spr::stack_io {

struct Diagnostic {
  std::size_t line;  // 0 for whole-file problems
  std::string message;
};

struct StackParseResult {
  std::optional<LayerStack> stack;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return stack.has_value(); }
};

inline std::string format(const Diagnostic& d) {
  return d.line == 0 ? d.message : "line " + std::to_string(d.line) + ": " + d.message;
}

/// Parses a stack, collecting every violation rather than stopping at the first.
inline StackParseResult parse_stack(std::istream& in) {
  struct Row {
    std::size_t line;
    Layer layer;
    bool thickness_ok;
    bool permittivity_ok;
  };
  StackParseResult result;
  auto diag = [&](std::size_t line, std::string msg) { result.diagnostics.push_back({line, std::move(msg)}); };

  std::vector<Row> rows;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    std::string_view body = text;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = csv::trim(body);
    if (body.empty()) continue;

    const auto fields = csv::split(body);
    if (fields.size() != 4) {
      diag(line_no, "expected 4 fields (name,eps_re,eps_im,thickness_nm), got " + std::to_string(fields.size()));
      continue;
    }
    Row row{line_no, Layer{std::string(fields[0]), {}, std::nullopt}, true, false};
    if (fields[0].empty()) {
      diag(line_no, "empty layer name");
    }
    const auto re = csv::parse_double(fields[1]);
    const auto im = csv::parse_double(fields[2]);
    if (!re) diag(line_no, "invalid eps_re '" + std::string(fields[1]) + "'");
    if (!im) diag(line_no, "invalid eps_im '" + std::string(fields[2]) + "'");
    if (re && im) {
      row.layer.permittivity = {*re, *im};
      row.permittivity_ok = true;
    }
    if (fields[3] != "inf") {
      const auto d = csv::parse_double(fields[3]);
      if (!d) {
        diag(line_no, "invalid thickness '" + std::string(fields[3]) + "'");
        row.thickness_ok = false;
      } else if (*d < 0.0) {
        diag(line_no, "negative thickness " + std::string(fields[3]));
        row.thickness_ok = false;
      } else {
        row.layer.thickness_nm = *d;
      }
    }
    rows.push_back(std::move(row));
  }

  if (rows.size() < 2) {
    diag(0, "a stack needs at least two layers, found " + std::to_string(rows.size()));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const bool bounding = i == 0 || i + 1 == rows.size();
    if (!row.thickness_ok) continue;
    if (bounding && !row.layer.semi_infinite()) {
      diag(row.line, std::string(i == 0 ? "first" : "last") + " layer '" + row.layer.name + "' must have thickness 'inf'");
    } else if (!bounding && row.layer.semi_infinite()) {
      diag(row.line, "interior layer '" + row.layer.name + "' cannot be semi-infinite");
    }
  }
  if (!rows.empty() && rows.front().permittivity_ok) {
    const auto prism = rows.front().layer.permittivity;
    if (prism.imag() != 0.0 || !(prism.real() > 0.0)) {
      diag(rows.front().line, "prism permittivity must be real and positive");
    }
  }

  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
  if (!result.diagnostics.empty()) return result;

  std::vector<Layer> layers;
  layers.reserve(rows.size());
  for (auto& row : rows) layers.push_back(std::move(row.layer));
  try {
    result.stack.emplace(std::move(layers));
  } catch (const Error& e) {
    diag(0, e.what());
  }
  return result;
}

inline StackParseResult parse_stack(const std::string& text) {
  std::istringstream in(text);
  return parse_stack(in);
}

/// Reads and parses a stack file. Unreadable files raise an io error;
/// format problems come back as diagnostics.
inline StackParseResult validate_stack_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cli::validate_stack_file", "cannot open stack file '" + path + "'");
  return parse_stack(in);
}

/// Parses or throws a parse error listing every diagnostic.
inline LayerStack load_stack(const std::string& path) {
  auto result = validate_stack_file(path);
  if (result.ok()) return std::move(*result.stack);
  std::string msg = "invalid stack file '" + path + "'";
  for (const auto& d : result.diagnostics) msg += "\n  " + format(d);
  fail(ErrorKind::parse, "cli::validate_stack_file", msg);
}

inline std::string write_stack(const LayerStack& stack) {
  std::string out = "# name,eps_re,eps_im,thickness_nm\n";
  for (const auto& layer : stack) {
    out += layer.name + "," + csv::format(layer.permittivity.real(), 17) + "," + csv::format(layer.permittivity.imag(), 17) +
           "," + (layer.semi_infinite() ? std::string("inf") : csv::format(*layer.thickness_nm, 17)) + "\n";
  }
  return out;
}

}  // namespace spr::stack_io
