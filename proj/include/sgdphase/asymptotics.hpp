#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sgdphase/genfunc.hpp"
#include "sgdphase/spectrum.hpp"

namespace sgdphase {

enum class Phase {
  signal_dominated,
  noise_dominated,
  boundary,
  eventual_divergence,
  immediate_divergence,
};

const char* to_string(Phase phase);

// nu <= 1/2: immediate divergence; nu <= 1: eventual divergence; otherwise
// signal vs noise by zeta against 2 - 1/nu, with a 1e-9 boundary band.
Phase classify_phase(double nu, double zeta);

struct AsymptoteReport {
  Phase phase = Phase::signal_dominated;
  double exponent = 0;   // L(t) ~ constant t^exponent, negative
  double constant = 0;
  double c_signal = 0;
  double c_noise = 0;
  double U1 = 0;
  double V1 = 0;
  double nu = 0;
  double zeta = 0;

  double at(double t) const;  // constant * t^exponent
  nlohmann::json to_json() const;
};

// Large-t loss law for power-law tails. Throws not_convergent when U(1) >= 1
// or the noiseless bound fails, and not_applicable outside the two
// convergent phases.
AsymptoteReport loss_asymptote(const Spectrum& spectrum, const GenFuncParams& p,
                               const PowerLawFit& fit);

// (C_signal / C_noise)^(1 / (zeta - 2 + 1/nu)); noise-dominated phase only.
double transition_time(const AsymptoteReport& report);

struct BlowupReport {
  double a_star = 0;
  double eps_star = 0;        // closed-form small-alpha estimate of 1 - r_L
  double r_L = 0;             // exact root on the given spectrum
  double t_div = 0;
  double t_blowup = 0;        // a_star * t_div
  double early_constant = 0;  // L(t) ~ early_constant t^-zeta before blow-up

  nlohmann::json to_json() const;
};

// Root of (1/nu - 1) / Gamma(1 - zeta) a^-zeta = e^a.
double solve_a_star(double nu, double zeta);
double eps_star_estimate(double nu, double alpha, double Lambda);

// Requires beta = 0, tau = gamma = 1, 1/2 < nu < 1 and zeta < 1.
BlowupReport blowup_time(const Spectrum& spectrum, const GenFuncParams& p,
                         const PowerLawFit& fit);

struct XiReport {
  double xi = 0;
  Phase phase = Phase::noise_dominated;
  std::string recommendation;  // sign of beta that lowers the late loss

  nlohmann::json to_json() const;
};

// nu Tr H Tr(H C0) - (nu - 1) Tr H^2 Tr C0.
XiReport xi_criterion(const Spectrum& spectrum, double nu, double zeta);

struct AlphaOpt {
  double alpha_opt = 0;
  double alpha_max = 0;  // 2 / Tr H
};

// Minimiser of the large-t loss law over alpha at beta = 0, tau = gamma = 1.
AlphaOpt optimal_alpha(const Spectrum& spectrum, double nu, double zeta);

struct PhaseCell {
  double nu = 0;
  double zeta = 0;
  Phase phase = Phase::signal_dominated;
  double exponent = 0;  // NaN outside the convergent phases
  double constant = 0;  // NaN when no constant exists
};

// Classifies every (nu, zeta) pair and, for convergent cells, evaluates the
// constant on a Lambda = K = 1 power law with `modes` modes.
std::vector<PhaseCell> phase_diagram(const std::vector<double>& nus,
                                     const std::vector<double>& zetas, const GenFuncParams& p,
                                     std::size_t modes);

}  // namespace sgdphase
