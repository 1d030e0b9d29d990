#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace spr {

/// Failure categories raised by the toolkit. The CLI maps them onto exit codes.
enum class ErrorKind {
  io,
  parse,
  validation,
  domain,
  singularity,
  model,
  range,
  window,
  alignment,
  profile,
  fit,
  bracket,
  ambiguity,
  convergence,
  perturbation,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::singularity: return "singularity error";
    case ErrorKind::model: return "model error";
    case ErrorKind::range: return "range error";
    case ErrorKind::window: return "window error";
    case ErrorKind::alignment: return "alignment error";
    case ErrorKind::profile: return "profile error";
    case ErrorKind::fit: return "fit error";
    case ErrorKind::bracket: return "bracket error";
    case ErrorKind::ambiguity: return "ambiguity error";
    case ErrorKind::convergence: return "convergence error";
    case ErrorKind::perturbation: return "perturbation error";
  }
  return "error";
}

/// Exception carrying a category and the `module::operation` that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string where, const std::string& what)
      : std::runtime_error(what), kind_(kind), where_(std::move(where)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ErrorKind kind_;
  std::string where_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string where, const std::string& what) {
  throw Error(kind, std::move(where), what);
}

}  // namespace spr
