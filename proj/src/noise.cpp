#include <cmath>

#include "sgdphase/errors.hpp"
#include "sgdphase/simulate.hpp"

namespace sgdphase {

Eigen::MatrixXd exact_noise_covariance(const FeatureProblem& problem, const Eigen::MatrixXd& C) {
  const auto& psi = problem.psi;
  if (C.rows() != psi.rows() || C.cols() != psi.rows())
    fail(ErrorKind::invalid_spec, "C must be d x d");
  const double n = static_cast<double>(problem.samples());
  const Eigen::VectorXd quad = (psi.transpose() * C * psi).diagonal();
  const Eigen::MatrixXd H = problem.hessian();
  return (psi * quad.asDiagonal() * psi.transpose()) / n - H * C * H;
}

std::vector<double> se_noise_diagonal(const Spectrum& spectrum, const std::vector<double>& c_diag,
                                      double tau1, double tau2) {
  if (c_diag.size() != spectrum.size())
    fail(ErrorKind::invalid_spec, "need one C_kk per mode");
  double tr = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) tr += spectrum.lambdas[k] * c_diag[k];
  std::vector<double> out(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double l = spectrum.lambdas[k];
    out[k] = tau1 * l * tr - tau2 * l * l * c_diag[k];
  }
  return out;
}

double SeFitError::operator()(double tau1, double tau2) const {
  return (sigma - tau1 * A + tau2 * B).squaredNorm() / sigma.squaredNorm();
}

double SeFitError::quadratic(double tau1, double tau2) const {
  const Eigen::Vector2d t(tau1, tau2);
  return t.dot(Q * t) + 2.0 * l.dot(t) + 1.0;
}

SeFitError se_fit_error(const Eigen::MatrixXd& H, const Eigen::MatrixXd& sigma,
                        const Eigen::MatrixXd& C) {
  const double ss = sigma.squaredNorm();
  if (!(ss > 0.0)) fail(ErrorKind::undefined_ratio, "noise covariance is zero");
  const Eigen::MatrixXd HC = H * C;
  const Eigen::MatrixXd A = HC.trace() * H;
  const Eigen::MatrixXd B = HC * H;
  // Residual Sigma - tau1 A + tau2 B, so tau2 enters with a plus sign.
  const double sa = (sigma.cwiseProduct(A)).sum();
  const double sb = (sigma.cwiseProduct(B)).sum();
  const double aa = A.squaredNorm();
  const double bb = B.squaredNorm();
  const double ab = (A.cwiseProduct(B)).sum();
  SeFitError e;
  e.Q << aa / ss, -ab / ss, -ab / ss, bb / ss;
  e.l << -sa / ss, sb / ss;
  if (bb > 0.0) {
    e.tau2_star = (ab - sb) / bb;
  } else {
    e.tau2_star = 0.0;
  }
  e.sigma = sigma;
  e.A = A;
  e.B = B;
  e.e2_star = e(1.0, e.tau2_star);
  return e;
}

SeFitError se_fit_error(const FeatureProblem& problem, const Eigen::MatrixXd& C) {
  return se_fit_error(problem.hessian(), exact_noise_covariance(problem, C), C);
}

}  // namespace sgdphase
