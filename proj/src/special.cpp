#include "sgdphase/special.hpp"

#include <cmath>

#include "sgdphase/errors.hpp"

namespace sgdphase {

namespace {

void check_pole(double x) {
  if (x <= 0.0 && x == std::floor(x))
    fail(ErrorKind::analysis_domain, "Gamma has a pole at " + std::to_string(x));
}

}  // namespace

double gamma_fn(double x) {
  check_pole(x);
  return std::tgamma(x);
}

double log_gamma(double x) {
  check_pole(x);
  return std::lgamma(x);
}

}  // namespace sgdphase
