#include "sgdphase/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgdphase/errors.hpp"
#include "sgdphase/rng.hpp"

namespace sgdphase {

double Spectrum::trace() const {
  double s = 0.0;
  for (double l : lambdas) s += l;
  return s;
}

double Spectrum::trace_sq() const {
  double s = 0.0;
  for (double l : lambdas) s += l * l;
  return s;
}

double Spectrum::initial_loss() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return 0.5 * s;
}

double Spectrum::trace_c0() const {
  double s = 0.0;
  for (std::size_t k = 0; k < size(); ++k) s += c0(k);
  return s;
}

void Spectrum::validate() const {
  if (lambdas.empty()) fail(ErrorKind::empty_spectrum, "spectrum has no modes");
  if (weights.size() != lambdas.size())
    fail(ErrorKind::invalid_spec, "lambdas and weights differ in length");
  for (std::size_t k = 0; k < size(); ++k) {
    if (!(lambdas[k] > 0.0) || !std::isfinite(lambdas[k]))
      fail(ErrorKind::invalid_spec, "eigenvalue " + std::to_string(k + 1) + " is not positive");
    if (k > 0 && lambdas[k] > lambdas[k - 1])
      fail(ErrorKind::invalid_spec, "eigenvalues are not sorted non-increasing");
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k]))
      fail(ErrorKind::invalid_spec, "weight " + std::to_string(k + 1) + " is negative");
  }
  if (dataset_size && *dataset_size < 1) fail(ErrorKind::invalid_spec, "dataset size is zero");
}

Spectrum build_power_law(const PowerLawSpec& spec) {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(spec.Lambda)) fail(ErrorKind::invalid_spec, "Lambda must be positive");
  if (!positive(spec.nu)) fail(ErrorKind::invalid_spec, "nu must be positive");
  if (!positive(spec.K)) fail(ErrorKind::invalid_spec, "K must be positive");
  if (!positive(spec.kappa)) fail(ErrorKind::invalid_spec, "kappa must be positive");
  if (spec.modes < 2) fail(ErrorKind::invalid_spec, "need at least 2 modes");

  Spectrum s;
  const std::size_t m = spec.modes;
  s.lambdas.resize(m);
  s.weights.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double k = static_cast<double>(i + 1);
    s.lambdas[i] = spec.Lambda * std::pow(k, -spec.nu);
    if (spec.convention == C0Convention::differenced) {
      const double tail = spec.K * std::pow(k, -spec.kappa);
      const double next = (i + 1 == m) ? 0.0 : spec.K * std::pow(k + 1.0, -spec.kappa);
      s.weights[i] = tail - next;
    } else {
      s.weights[i] = spec.K * spec.kappa * std::pow(k, -spec.kappa - 1.0);
    }
  }
  return s;
}

double gamma_for_batch(std::optional<std::size_t> dataset_size, std::size_t batch) {
  if (batch < 1) fail(ErrorKind::invalid_batch, "batch size must be at least 1");
  const double b = static_cast<double>(batch);
  if (!dataset_size) return 1.0 / b;
  const std::size_t n = *dataset_size;
  if (batch > n)
    fail(ErrorKind::invalid_batch,
         "batch " + std::to_string(batch) + " exceeds dataset size " + std::to_string(n));
  if (n == 1) return 0.0;
  const double nd = static_cast<double>(n);
  return (nd - b) / ((nd - 1.0) * b);
}

Eigen::MatrixXd FeatureProblem::hessian() const {
  return (psi * psi.transpose()) / static_cast<double>(samples());
}

FeatureProblem random_feature_problem(std::size_t dim, std::size_t samples,
                                      std::uint64_t seed) {
  if (dim < 1 || samples < 1) fail(ErrorKind::invalid_spec, "empty feature problem");
  FeatureProblem p;
  p.psi.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(samples));
  CounterRng rng(seed, 0);
  for (Eigen::Index j = 0; j < p.psi.cols(); ++j)
    for (Eigen::Index i = 0; i < p.psi.rows(); ++i) p.psi(i, j) = rng.normal();
  p.w_star.resize(static_cast<Eigen::Index>(dim));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < p.w_star.size(); ++i) p.w_star(i) = scale * rng.normal();
  p.w0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  return p;
}

EigenProblem eigendecompose(const FeatureProblem& problem) {
  if (problem.psi.size() == 0) fail(ErrorKind::empty_spectrum, "feature matrix is empty");
  if (problem.w_star.size() != problem.psi.rows() || problem.w0.size() != problem.psi.rows())
    fail(ErrorKind::invalid_spec, "w* and w0 must have the feature dimension");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(problem.hessian());
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  const double lmax = ev.size() ? ev(ev.size() - 1) : 0.0;
  if (!(lmax > 0.0)) fail(ErrorKind::empty_spectrum, "Hessian is zero");

  const Eigen::VectorXd dw = problem.initial_error();
  EigenProblem out;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > 1e-12 * lmax) keep.push_back(i);
  out.basis.resize(problem.psi.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Eigen::Index i = keep[k];
    const double lam = ev(i);
    const double proj = es.eigenvectors().col(i).dot(dw);
    out.spectrum.lambdas.push_back(lam);
    out.spectrum.weights.push_back(lam * proj * proj);
    out.basis.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(i);
  }
  out.spectrum.dataset_size = problem.samples();
  return out;
}

}  // namespace sgdphase
