#include <cmath>

#include "sgdphase/errors.hpp"
#include "sgdphase/simulate.hpp"

namespace sgdphase {

MomentState full_moment_step(const Eigen::MatrixXd& H, const MomentState& s, double alpha,
                             double beta, double gamma, const Eigen::MatrixXd& noise) {
  const auto d = H.rows();
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d) - alpha * H;
  const Eigen::MatrixXd g = (gamma * alpha * alpha) * noise;
  const Eigen::MatrixXd PJ = P * s.J;
  const Eigen::MatrixXd HJ = H * s.J;
  MomentState out;
  out.C = P * s.C * P + beta * (PJ + PJ.transpose()) + (beta * beta) * s.V + g;
  out.J = -alpha * (P * s.C + beta * s.J.transpose()) * H + beta * (PJ + beta * s.V) + g;
  out.V = (alpha * alpha) * (H * s.C * H) - (alpha * beta) * (HJ + HJ.transpose()) +
          (beta * beta) * s.V + g;
  return out;
}

LossTrajectory run_full_moments(const FeatureProblem& problem, const SGDParams& params,
                                NoiseModel noise) {
  params.validate();
  if (problem.dim() > 256)
    fail(ErrorKind::resource_limit,
         "dense moments need d <= 256, got " + std::to_string(problem.dim()));
  if (problem.samples() == 0) fail(ErrorKind::empty_spectrum, "no samples");
  const double gamma = gamma_for_batch(problem.samples(), params.batch);
  const Eigen::MatrixXd H = problem.hessian();
  const Eigen::VectorXd dw = problem.initial_error();
  const auto d = H.rows();

  MomentState s{dw * dw.transpose(), Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
  LossTrajectory traj;
  traj.losses.reserve(params.steps + 1);
  auto loss_of = [&](const Eigen::MatrixXd& C) { return 0.5 * (H.cwiseProduct(C)).sum(); };
  traj.losses.push_back(loss_of(s.C));
  const double limit = divergence_threshold(traj.losses[0]);
  for (std::size_t t = 1; t <= params.steps; ++t) {
    Eigen::MatrixXd sigma;
    if (noise == NoiseModel::exact) {
      sigma = exact_noise_covariance(problem, s.C);
    } else {
      const Eigen::MatrixXd HC = H * s.C;
      sigma = params.tau1 * HC.trace() * H - params.tau2 * (HC * H);
    }
    s = full_moment_step(H, s, params.alpha, params.beta, gamma, sigma);
    const double loss = loss_of(s.C);
    traj.losses.push_back(loss);
    if (!std::isfinite(loss) || loss > limit) {
      traj.diverged_at = t;
      break;
    }
  }
  SGDParams echo = params;
  echo.gamma = gamma;
  traj.metadata["regime"] = noise == NoiseModel::exact ? "full" : "full_se_surrogate";
  traj.metadata["params"] = echo.to_json();
  traj.metadata["dim"] = problem.dim();
  traj.metadata["samples"] = problem.samples();
  if (traj.diverged_at) traj.metadata["diverged_at"] = *traj.diverged_at;
  return traj;
}

}  // namespace sgdphase
