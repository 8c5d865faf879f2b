#include <cmath>

#include "sgdphase/errors.hpp"
#include "sgdphase/simulate.hpp"

namespace sgdphase {

AdditiveResult run_additive_noise(const Spectrum& spectrum, double alpha,
                                  const std::vector<double>& g_diag, std::size_t steps) {
  spectrum.validate();
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_spec, "alpha must be positive");
  if (g_diag.size() != spectrum.size()) fail(ErrorKind::invalid_spec, "need one G_kk per mode");
  for (double g : g_diag)
    if (!(g >= 0.0)) fail(ErrorKind::invalid_spec, "G must be non-negative");
  if (alpha * spectrum.lambda_max() >= 2.0)
    fail(ErrorKind::no_stationary_state, "alpha lambda_max >= 2");

  const std::size_t n = spectrum.size();
  AdditiveResult res;
  res.c_inf.resize(n);
  std::vector<double> rate(n), c(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double l = spectrum.lambdas[k];
    const double r = 1.0 - alpha * l;
    rate[k] = r * r;
    res.c_inf[k] = alpha * g_diag[k] / (l * (2.0 - alpha * l));
    res.loss_inf += 0.5 * l * res.c_inf[k];
    c[k] = spectrum.c0(k);
  }
  auto loss = [&] {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += spectrum.lambdas[k] * c[k];
    return 0.5 * s;
  };
  auto& traj = res.trajectory;
  traj.losses.push_back(loss());
  const double a2 = alpha * alpha;
  for (std::size_t t = 1; t <= steps; ++t) {
    for (std::size_t k = 0; k < n; ++k) c[k] = rate[k] * c[k] + a2 * g_diag[k];
    traj.losses.push_back(loss());
  }
  traj.metadata["regime"] = "additive";
  traj.metadata["alpha"] = alpha;
  traj.metadata["loss_inf"] = res.loss_inf;
  return res;
}

}  // namespace sgdphase
