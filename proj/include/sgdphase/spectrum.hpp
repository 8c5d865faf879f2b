#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sgdphase {

/**
 * Eigenvalues of the Hessian with the initial error projected on each mode.
 *
 * `weights[k]` is lambda_k * C_kk(0), the share of mode k in twice the initial
 * loss. Storing the product (instead of C_kk) keeps CSV round trips exact and
 * avoids dividing by tiny eigenvalues in the output-space recursions.
 */
struct Spectrum {
  std::vector<double> lambdas;               // non-increasing, > 0
  std::vector<double> weights;               // lambda_k * C_kk(0), >= 0
  std::optional<std::size_t> dataset_size;   // nullopt: infinite dataset

  std::size_t size() const { return lambdas.size(); }
  double c0(std::size_t k) const { return weights[k] / lambdas[k]; }
  double lambda_max() const { return lambdas.front(); }
  double trace() const;                      // sum of lambdas
  double trace_sq() const;                   // sum of lambda^2
  double initial_loss() const;               // 0.5 * sum of weights
  double trace_c0() const;                   // sum of C_kk(0)

  // Throws invalid_spec / empty_spectrum when the invariants do not hold.
  void validate() const;
};

enum class C0Convention { differenced, pointwise };

struct PowerLawSpec {
  double Lambda = 1.0;
  double nu = 1.5;
  double K = 1.0;
  double kappa = 1.0;
  std::size_t modes = 1000;
  C0Convention convention = C0Convention::differenced;
};

// lambda_k = Lambda k^-nu. Differenced: weights are S_k - S_{k+1} with
// S_k = K k^-kappa and S_{M+1} = 0, so the last mode carries the tail mass.
// Pointwise: weight_k = K kappa k^(-kappa-1).
Spectrum build_power_law(const PowerLawSpec& spec);

// Mini-batch noise factor (N - b) / ((N - 1) b); 1/b for an infinite dataset.
double gamma_for_batch(std::optional<std::size_t> dataset_size, std::size_t batch);

/** Explicit regression problem: columns of `psi` are the N feature vectors. */
struct FeatureProblem {
  Eigen::MatrixXd psi;     // d x N
  Eigen::VectorXd w_star;  // d
  Eigen::VectorXd w0;      // d

  std::size_t dim() const { return static_cast<std::size_t>(psi.rows()); }
  std::size_t samples() const { return static_cast<std::size_t>(psi.cols()); }
  Eigen::MatrixXd hessian() const;  // psi psi^T / N
  Eigen::VectorXd initial_error() const { return w0 - w_star; }
};

// Standard Gaussian features with w* ~ N(0, I / d) and w0 = 0.
FeatureProblem random_feature_problem(std::size_t dim, std::size_t samples,
                                      std::uint64_t seed);

struct EigenProblem {
  Spectrum spectrum;
  Eigen::MatrixXd basis;  // d x M, column k is the eigenvector of lambdas[k]
};

// Drops eigenvalues <= 1e-12 lambda_max; dataset_size is the sample count.
EigenProblem eigendecompose(const FeatureProblem& problem);

/**
 * Translation-invariant problem on a periodic grid with kernel
 * K(x_i, x_j) = kernel[(i - j) mod dims]. Features are sqrt(N) K^{1/2}, so
 * the Hessian equals the circulant kernel matrix and its eigenvectors are the
 * Fourier modes.
 */
struct TorusProblem {
  std::vector<std::size_t> dims;
  std::vector<double> fourier_eigenvalues;  // indexed like the grid
  FeatureProblem features;
  Spectrum spectrum;                        // sorted, complex Fourier basis
  std::vector<std::size_t> spectrum_order;  // spectrum index -> grid index

  std::size_t samples() const { return fourier_eigenvalues.size(); }
  // Diagonal f_k^H A f_k of a symmetric N x N matrix in the Fourier basis.
  std::vector<double> fourier_diagonal(const Eigen::MatrixXd& a) const;
  // The same diagonal reordered to match `spectrum`.
  std::vector<double> spectrum_diagonal(const Eigen::MatrixXd& a) const;
};

TorusProblem build_torus_problem(const std::vector<std::size_t>& dims,
                                 const std::vector<double>& kernel,
                                 const Eigen::VectorXd& w_star,
                                 const Eigen::VectorXd& w0);

// Eigenvalues sum_m K_m exp(i k.x_m) in grid order. Throws non_psd_kernel.
std::vector<double> torus_eigenvalues(const std::vector<std::size_t>& dims,
                                      const std::vector<double>& kernel);

struct PowerLawFit {
  double Lambda = 0;
  double nu = 0;
  double K = 0;
  double kappa = 0;
  std::size_t tail_start = 0;  // 1-based first mode of the fitted tail
  double residual = 0;         // mean squared log residual, both regressions
};

// Log-log least squares over modes k >= tail_start (default M/10). The
// eigenvalue law is read from lambda_k. The target law is read from the tail
// sums S_k (differenced) or from the weights directly (pointwise).
PowerLawFit fit_power_law(const Spectrum& spectrum,
                          std::optional<std::size_t> tail_start = std::nullopt,
                          C0Convention convention = C0Convention::differenced);

// CSV with columns `k,lambda,lambda_c` or `lambda,lambda_c`; header optional,
// '#' starts a comment. Rows are sorted by decreasing lambda.
Spectrum load_spectrum_csv(const std::string& path);
Spectrum parse_spectrum_csv(const std::string& text);
void save_spectrum_csv(const Spectrum& spectrum, const std::string& path);

}  // namespace sgdphase
