#include <cmath>

#include "sgdphase/errors.hpp"
#include "sgdphase/kernels.hpp"
#include "sgdphase/simulate.hpp"

namespace sgdphase {

void SGDParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    fail(ErrorKind::invalid_spec, "alpha must be positive");
  if (!(beta > -1.0 && beta < 1.0)) fail(ErrorKind::invalid_spec, "beta must lie in (-1, 1)");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail(ErrorKind::invalid_spec, "gamma must lie in [0, 1]");
  if (!std::isfinite(tau1) || !std::isfinite(tau2))
    fail(ErrorKind::invalid_spec, "tau1 and tau2 must be finite");
  if (batch < 1) fail(ErrorKind::invalid_batch, "batch size must be at least 1");
}

nlohmann::json SGDParams::to_json() const {
  return {{"alpha", alpha}, {"beta", beta},   {"gamma", gamma}, {"tau1", tau1},
          {"tau2", tau2},   {"steps", steps}, {"batch", batch}};
}

double divergence_threshold(double initial_loss) {
  return initial_loss > 0.0 ? 1e12 * initial_loss : 1e300;
}

namespace {

LossTrajectory run_output_space(const Spectrum& spectrum, const SGDParams& p) {
  spectrum.validate();
  p.validate();
  const std::size_t n = spectrum.size();
  std::vector<double> a(n), m(n), q(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double al = p.alpha * spectrum.lambdas[k];
    a[k] = 1.0 - al;
    m[k] = -al;
    q[k] = p.gamma * al * al;
  }
  std::vector<double> c = spectrum.weights;
  std::vector<double> j(n, 0.0), v(n, 0.0);

  const kernels::Isa isa = kernels::active_isa();
  double trace = kernels::sum(isa, n, c.data());
  LossTrajectory traj;
  traj.losses.reserve(p.steps + 1);
  traj.losses.push_back(0.5 * trace);
  const double limit = divergence_threshold(traj.losses[0]);
  std::optional<std::size_t> negative_at;
  for (std::size_t t = 1; t <= p.steps; ++t) {
    const auto r = kernels::se_step(isa, n, a.data(), m.data(), q.data(), p.beta, p.tau1, p.tau2,
                                    trace, c.data(), j.data(), v.data());
    trace = r.trace;
    const double loss = 0.5 * trace;
    traj.losses.push_back(loss);
    if (!negative_at && r.min_c < 0.0) negative_at = t;
    if (!std::isfinite(loss) || loss > limit) {
      traj.diverged_at = t;
      break;
    }
  }
  traj.metadata["params"] = p.to_json();
  traj.metadata["modes"] = n;
  traj.metadata["isa"] = kernels::to_string(isa);
  if (negative_at) traj.metadata["negative_moment_step"] = *negative_at;
  if (traj.diverged_at) traj.metadata["diverged_at"] = *traj.diverged_at;
  return traj;
}

}  // namespace

LossTrajectory run_se(const Spectrum& spectrum, const SGDParams& params) {
  LossTrajectory t = run_output_space(spectrum, params);
  t.metadata["regime"] = "se";
  return t;
}

LossTrajectory run_noiseless(const Spectrum& spectrum, double alpha, double beta,
                             std::size_t steps) {
  SGDParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = 0.0;
  p.steps = steps;
  LossTrajectory t = run_output_space(spectrum, p);
  t.metadata["regime"] = "noiseless";
  return t;
}

}  // namespace sgdphase
