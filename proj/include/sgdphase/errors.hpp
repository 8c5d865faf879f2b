#pragma once

#include <stdexcept>
#include <string>

namespace sgdphase {

enum class ErrorKind {
  invalid_spec,
  invalid_batch,
  empty_spectrum,
  non_psd_kernel,
  non_loggable,
  parse_error,
  resource_limit,
  no_stationary_state,
  analysis_domain,
  no_root,
  not_divergent,
  not_convergent,
  not_applicable,
  undefined_ratio,
  axis_domain,
  config_error,
};

const char* to_string(ErrorKind kind);

// Validation errors are the caller's fault (bad input); domain errors mean the
// input is well-formed but the requested quantity does not exist.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace sgdphase
