#pragma once

namespace sgdphase {

// Gamma function; throws analysis_domain at the poles 0, -1, -2, ...
double gamma_fn(double x);
// log |Gamma(x)|, same poles.
double log_gamma(double x);

}  // namespace sgdphase
