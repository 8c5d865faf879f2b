#include "sgdphase/errors.hpp"

namespace sgdphase {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_spec: return "invalid spec";
    case ErrorKind::invalid_batch: return "invalid batch";
    case ErrorKind::empty_spectrum: return "empty spectrum";
    case ErrorKind::non_psd_kernel: return "non-PSD kernel";
    case ErrorKind::non_loggable: return "non-loggable data";
    case ErrorKind::parse_error: return "parse error";
    case ErrorKind::resource_limit: return "resource limit";
    case ErrorKind::no_stationary_state: return "no stationary state";
    case ErrorKind::analysis_domain: return "analysis domain";
    case ErrorKind::no_root: return "no root";
    case ErrorKind::not_divergent: return "not divergent";
    case ErrorKind::not_convergent: return "not convergent";
    case ErrorKind::not_applicable: return "not applicable";
    case ErrorKind::undefined_ratio: return "undefined ratio";
    case ErrorKind::axis_domain: return "axis domain";
    case ErrorKind::config_error: return "config error";
  }
  return "error";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_spec:
    case ErrorKind::invalid_batch:
    case ErrorKind::empty_spectrum:
    case ErrorKind::non_psd_kernel:
    case ErrorKind::non_loggable:
    case ErrorKind::parse_error:
    case ErrorKind::resource_limit:
    case ErrorKind::config_error:
      return true;
    default:
      return false;
  }
}

}  // namespace sgdphase
