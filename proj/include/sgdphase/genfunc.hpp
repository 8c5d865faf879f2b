#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sgdphase/spectrum.hpp"

namespace sgdphase {

// Hyperparameters of the spectral analysis: tau1 = 1 and tau2 = tau.
struct GenFuncParams {
  double alpha = 0.1;
  double beta = 0.0;
  double gamma = 0.0;
  double tau = 1.0;
};

// Denominator S(alpha, beta, g, lambda, z) of the per-mode generating
// functions, written as (1 - z)(1 - beta z)(1 - beta^2 z) plus terms in lambda
// so that it stays accurate near z = 1 for small lambda.
double eval_S(double alpha, double beta, double g, double lambda, double z);

struct UVValues {
  double U, dU;  // U(z) and U'(z)
  double V, dV;  // V(z) and V'(z)
};

// U(z) = gamma alpha^2 sum_k lambda_k^2 (beta z + 1) / S_k
// V(z) = sum_k lambda_k C_kk (1 - (beta + beta^2) z + 2 alpha beta lambda_k z + beta^3 z^2) / S_k
// with g = tau gamma in S. Requires 0 <= z < 1. Throws analysis_domain when
// some S_k <= 0 or z U(z) is not increasing at z.
UVValues eval_UV(const Spectrum& spectrum, const GenFuncParams& p, double z);

struct U1Value {
  double value;  // +inf when a denominator is not positive
  bool finite;
};

U1Value eval_U1(const Spectrum& spectrum, const GenFuncParams& p);
double eval_V1(const Spectrum& spectrum, const GenFuncParams& p);

// Unique root of sum_k lambda_k / (tau lambda_k + x) = 1 on (0, sum lambda];
// 0 when the sum never exceeds 1 on that interval.
double solve_lambda_crit(const Spectrum& spectrum, double tau);

struct StabilityReport {
  bool in_domain = true;          // beta in (-1, 1), alpha > 0, gamma in [0, 1]
  std::string domain_note;
  bool noiseless_stable = false;  // alpha < 2 (1 + beta) / lambda_max
  double U1 = 0;
  bool U1_finite = true;
  bool converges = false;
  double lambda_crit = 0;
  double alpha_eff = 0;              // alpha / (1 - beta)
  double alpha_eff_bound = 0;        // 2 / (gamma lambda_crit)
  double alpha_eff_critical = 0;     // largest stable alpha_eff at this beta
  double alpha_critical = 0;         // alpha_eff_critical (1 - beta)
  double tightness = 0;              // bound / critical - 1
  double tightness_limit = 0;        // (lambda_max / lambda_crit)(1 - beta)/(gamma(1 + beta))
  bool immediate_divergence = false;  // fitted nu <= 1/2
  bool eventual_divergence = false;   // 1/2 < nu <= 1

  nlohmann::json to_json() const;
};

StabilityReport stability_report(const Spectrum& spectrum, const GenFuncParams& p,
                                 std::optional<double> tail_nu = std::nullopt);

// Critical alpha at fixed beta: the largest alpha below the noiseless bound
// 2 (1 + beta) / lambda_max with U(1) < 1.
double critical_alpha(const Spectrum& spectrum, const GenFuncParams& p);

struct DivergenceReport {
  double r_L = 0;       // root of z U(z) = 1 in (0, 1)
  double t_div = 0;     // -1 / ln r_L
  double prefactor = 0; // V(r) / (2 (1 + r^2 U'(r))), L(t) ~ prefactor r^-t

  nlohmann::json to_json() const;
};

DivergenceReport solve_divergence(const Spectrum& spectrum, const GenFuncParams& p);

struct UVSequences {
  std::vector<double> U;  // U[t-1] = U_t, t = 1 .. T
  std::vector<double> V;  // V[t-1] = V_t, t = 1 .. T + 1
};

UVSequences compute_UV_sequences(const Spectrum& spectrum, const GenFuncParams& p,
                                 std::size_t steps);

// L(T) = V_{T+1} / 2 + sum_{t=1..T} U_{T+1-t} L(t-1), O(T^2).
std::vector<double> reconstruct_loss(const UVSequences& seq, std::size_t steps);

// Bisection helper used by every root finder here: returns the point where
// `upper(x)` switches from false to true on [lo, hi], 200 iterations max.
template <class Pred>
double bisect(double lo, double hi, double tol, Pred upper) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (upper(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sgdphase
