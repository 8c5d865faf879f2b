#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sgdphase/spectrum.hpp"

namespace sgdphase {

struct SGDParams {
  double alpha = 0.1;
  double beta = 0.0;
  double gamma = 0.0;   // noise factor used by the spectral recursions
  double tau1 = 1.0;
  double tau2 = 1.0;
  std::size_t steps = 1000;
  std::size_t batch = 1;  // used where gamma is derived from the dataset

  void validate() const;
  nlohmann::json to_json() const;
};

struct LossTrajectory {
  std::vector<double> losses;    // losses[t] for t = 0 .. last simulated step
  std::vector<double> stderrs;   // Monte Carlo only
  std::optional<std::size_t> diverged_at;
  nlohmann::json metadata = nlohmann::json::object();

  double final_loss() const { return losses.back(); }
};

// A run is flagged divergent at the first step with L > 1e12 L(0), or with
// L > 1e300 when L(0) = 0, or with a non-finite loss.
double divergence_threshold(double initial_loss);

// Per-mode second moments in output space, O(M) per step. Negative diagonal
// moments are recorded in metadata["negative_moment_step"] and not clipped.
LossTrajectory run_se(const Spectrum& spectrum, const SGDParams& params);

// Deterministic gradient descent with momentum on the same spectrum.
LossTrajectory run_noiseless(const Spectrum& spectrum, double alpha, double beta,
                             std::size_t steps);

enum class NoiseModel { exact, se_surrogate };

// Dense second moments in parameter space; d <= 256. gamma comes from the
// sample count and params.batch. The surrogate replaces the exact noise by
// tau1 H Tr(HC) - tau2 HCH.
LossTrajectory run_full_moments(const FeatureProblem& problem, const SGDParams& params,
                                NoiseModel noise = NoiseModel::exact);

struct MomentState {
  Eigen::MatrixXd C, J, V;  // E[dw dw^T], E[dw v^T], E[v v^T]
};

// One exact step of the dense recursion, exposed for property tests.
MomentState full_moment_step(const Eigen::MatrixXd& H, const MomentState& m, double alpha,
                             double beta, double gamma, const Eigen::MatrixXd& noise);

// Mean over independent runs of sampled mini-batch SGD, with standard errors.
// Run r draws from counter stream r, so output is independent of threads.
LossTrajectory run_mc(const FeatureProblem& problem, const SGDParams& params, std::size_t runs,
                      std::uint64_t seed, std::size_t threads = 0);

// (1/N) sum_i <psi_i, C psi_i> psi_i psi_i^T - HCH.
Eigen::MatrixXd exact_noise_covariance(const FeatureProblem& problem, const Eigen::MatrixXd& C);

// tau1 lambda_k sum_l lambda_l C_ll - tau2 lambda_k^2 C_kk.
std::vector<double> se_noise_diagonal(const Spectrum& spectrum, const std::vector<double>& c_diag,
                                      double tau1, double tau2);

/**
 * Relative Frobenius error of the SE surrogate,
 * E2(tau) = |Sigma - tau1 A + tau2 B|^2 / |Sigma|^2 with A = H Tr(HC), B = HCH,
 * stored as the quadratic form E2 = tau^T Q tau + 2 l^T tau + 1.
 */
struct SeFitError {
  Eigen::Matrix2d Q;
  Eigen::Vector2d l;
  double tau2_star = 0;  // minimiser over tau2 with tau1 = 1
  double e2_star = 0;
  Eigen::MatrixXd sigma, A, B;

  // Direct evaluation; exact zeros stay near machine precision squared.
  double operator()(double tau1, double tau2) const;
  // The same value from the quadratic form.
  double quadratic(double tau1, double tau2) const;
};

SeFitError se_fit_error(const FeatureProblem& problem, const Eigen::MatrixXd& C);
SeFitError se_fit_error(const Eigen::MatrixXd& H, const Eigen::MatrixXd& sigma,
                        const Eigen::MatrixXd& C);

struct AdditiveResult {
  LossTrajectory trajectory;
  std::vector<double> c_inf;  // stationary C_kk
  double loss_inf = 0;
};

// Plain GD (beta = 0) with additive noise of diagonal covariance G in the
// eigenbasis: C_kk <- (1 - alpha lambda_k)^2 C_kk + alpha^2 G_kk.
AdditiveResult run_additive_noise(const Spectrum& spectrum, double alpha,
                                  const std::vector<double>& g_diag, std::size_t steps);

// CSV `t,loss,stderr` plus a JSON sidecar `<path>.json` with the metadata.
void write_trajectory(const LossTrajectory& traj, const std::string& csv_path);

// JSON value for a double; NaN and infinities become strings.
nlohmann::json json_number(double x);

}  // namespace sgdphase
