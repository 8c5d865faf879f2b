#include "sgdphase/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "sgdphase/errors.hpp"
#include "sgdphase/simulate.hpp"
#include "sgdphase/special.hpp"

namespace sgdphase {

namespace {

constexpr double kBoundaryBand = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::signal_dominated: return "signal_dominated";
    case Phase::noise_dominated: return "noise_dominated";
    case Phase::boundary: return "boundary";
    case Phase::eventual_divergence: return "eventual_divergence";
    case Phase::immediate_divergence: return "immediate_divergence";
  }
  return "unknown";
}

Phase classify_phase(double nu, double zeta) {
  if (!(nu > 0.0) || !std::isfinite(zeta))
    fail(ErrorKind::invalid_spec, "nu must be positive and zeta finite");
  if (nu <= 0.5) return Phase::immediate_divergence;
  if (nu <= 1.0) return Phase::eventual_divergence;
  const double gap = zeta - (2.0 - 1.0 / nu);
  if (std::abs(gap) <= kBoundaryBand) return Phase::boundary;
  return gap < 0.0 ? Phase::signal_dominated : Phase::noise_dominated;
}

double AsymptoteReport::at(double t) const { return constant * std::pow(t, exponent); }

nlohmann::json AsymptoteReport::to_json() const {
  return {{"phase", to_string(phase)},       {"exponent", json_number(exponent)},
          {"constant", json_number(constant)}, {"c_signal", json_number(c_signal)},
          {"c_noise", json_number(c_noise)},   {"U1", json_number(U1)},
          {"V1", json_number(V1)},             {"nu", nu},
          {"zeta", zeta}};
}

AsymptoteReport loss_asymptote(const Spectrum& spectrum, const GenFuncParams& p,
                               const PowerLawFit& fit) {
  AsymptoteReport r;
  r.nu = fit.nu;
  r.zeta = fit.kappa / fit.nu;
  r.phase = classify_phase(r.nu, r.zeta);
  if (r.phase == Phase::immediate_divergence || r.phase == Phase::eventual_divergence)
    fail(ErrorKind::not_applicable, std::string("no convergent law in phase ") + to_string(r.phase));
  if (r.phase == Phase::boundary)
    fail(ErrorKind::not_applicable, "zeta = 2 - 1/nu: the two terms share an exponent");
  if (!(p.alpha < 2.0 * (1.0 + p.beta) / spectrum.lambda_max()))
    fail(ErrorKind::not_convergent, "alpha above the noiseless bound");
  const auto u1 = eval_U1(spectrum, p);
  if (!u1.finite || u1.value >= 1.0)
    fail(ErrorKind::not_convergent, "U(1) = " + std::to_string(u1.value) + " >= 1");
  r.U1 = u1.value;
  r.V1 = eval_V1(spectrum, p);
  const double scale = 2.0 * p.alpha * fit.Lambda / (1.0 - p.beta);
  const double one_minus = 1.0 - r.U1;
  r.c_signal = fit.K * gamma_fn(r.zeta + 1.0) / (2.0 * one_minus) * std::pow(scale, -r.zeta);
  r.c_noise = p.gamma * r.V1 * gamma_fn(2.0 - 1.0 / r.nu) /
              (8.0 * r.nu * one_minus * one_minus) * std::pow(scale, 1.0 / r.nu);
  if (r.phase == Phase::signal_dominated) {
    r.exponent = -r.zeta;
    r.constant = r.c_signal;
  } else {
    r.exponent = 1.0 / r.nu - 2.0;
    r.constant = r.c_noise;
  }
  return r;
}

double transition_time(const AsymptoteReport& report) {
  if (report.phase != Phase::noise_dominated)
    fail(ErrorKind::not_applicable, "transition time exists only in the noise-dominated phase");
  if (!(report.c_noise > 0.0)) fail(ErrorKind::undefined_ratio, "noise constant is zero");
  const double e = report.zeta - 2.0 + 1.0 / report.nu;
  return std::pow(report.c_signal / report.c_noise, 1.0 / e);
}

double solve_a_star(double nu, double zeta) {
  if (!(nu > 0.5 && nu < 1.0) || !(zeta >= 0.0 && zeta < 1.0))
    fail(ErrorKind::not_applicable, "a* needs 1/2 < nu < 1 and 0 <= zeta < 1");
  const double log_c = std::log(1.0 / nu - 1.0) - log_gamma(1.0 - zeta);
  // h(x) = log_c - zeta x - e^x with x = ln a is strictly decreasing.
  auto h = [&](double x) { return log_c - zeta * x - std::exp(x); };
  double lo = -700.0, hi = 10.0;
  while (h(hi) > 0.0) hi *= 2.0;
  if (h(lo) <= 0.0) fail(ErrorKind::no_root, "no positive root for a*");
  const double x = bisect(lo, hi, 1e-15, [&](double v) { return h(v) <= 0.0; });
  return std::exp(x);
}

double eps_star_estimate(double nu, double alpha, double Lambda) {
  const double c =
      gamma_fn(2.0 - 1.0 / nu) * gamma_fn(1.0 / nu - 1.0) / (4.0 * nu);
  return std::pow(c, nu / (1.0 - nu)) * std::pow(2.0 * alpha * Lambda, 1.0 / (1.0 - nu));
}

nlohmann::json BlowupReport::to_json() const {
  return {{"a_star", json_number(a_star)},   {"eps_star", json_number(eps_star)},
          {"r_L", json_number(r_L)},         {"t_div", json_number(t_div)},
          {"t_blowup", json_number(t_blowup)}, {"early_constant", json_number(early_constant)}};
}

BlowupReport blowup_time(const Spectrum& spectrum, const GenFuncParams& p,
                         const PowerLawFit& fit) {
  const double nu = fit.nu;
  const double zeta = fit.kappa / fit.nu;
  if (p.beta != 0.0 || p.gamma != 1.0 || p.tau != 1.0)
    fail(ErrorKind::not_applicable, "blow-up estimate needs beta = 0 and tau = gamma = 1");
  if (!(nu > 0.5 && nu < 1.0) || !(zeta < 1.0))
    fail(ErrorKind::not_applicable, "blow-up estimate needs 1/2 < nu < 1 and zeta < 1");
  BlowupReport b;
  b.a_star = solve_a_star(nu, zeta);
  b.eps_star = eps_star_estimate(nu, p.alpha, fit.Lambda);
  const auto d = solve_divergence(spectrum, p);
  b.r_L = d.r_L;
  b.t_div = d.t_div;
  b.t_blowup = b.a_star * b.t_div;
  b.early_constant =
      0.5 * fit.K * gamma_fn(zeta + 1.0) * std::pow(2.0 * p.alpha * fit.Lambda, -zeta);
  return b;
}

nlohmann::json XiReport::to_json() const {
  return {{"xi", json_number(xi)}, {"phase", to_string(phase)}, {"recommendation", recommendation}};
}

XiReport xi_criterion(const Spectrum& spectrum, double nu, double zeta) {
  spectrum.validate();
  XiReport r;
  r.phase = classify_phase(nu, zeta);
  const double trh = spectrum.trace();
  const double trh2 = spectrum.trace_sq();
  const double trhc = 2.0 * spectrum.initial_loss();
  const double trc = spectrum.trace_c0();
  r.xi = nu * trh * trhc - (nu - 1.0) * trh2 * trc;
  if (r.phase == Phase::signal_dominated) {
    r.recommendation = "positive momentum";
  } else if (r.phase == Phase::noise_dominated) {
    r.recommendation = r.xi > 0.0 ? "negative momentum" : (r.xi < 0.0 ? "positive momentum" : "indifferent");
  } else {
    r.recommendation = "not applicable";
  }
  return r;
}

AlphaOpt optimal_alpha(const Spectrum& spectrum, double nu, double zeta) {
  spectrum.validate();
  const Phase phase = classify_phase(nu, zeta);
  const double trh = spectrum.trace();
  AlphaOpt a;
  a.alpha_max = 2.0 / trh;
  if (phase == Phase::signal_dominated)
    a.alpha_opt = 2.0 * zeta / (zeta + 1.0) / trh;
  else if (phase == Phase::noise_dominated)
    a.alpha_opt = 2.0 * (nu - 1.0) / (3.0 * nu - 1.0) / trh;
  else
    fail(ErrorKind::not_applicable, std::string("no optimal alpha in phase ") + to_string(phase));
  return a;
}

std::vector<PhaseCell> phase_diagram(const std::vector<double>& nus,
                                     const std::vector<double>& zetas, const GenFuncParams& p,
                                     std::size_t modes) {
  std::vector<PhaseCell> out;
  for (double nu : nus) {
    for (double zeta : zetas) {
      PhaseCell c;
      c.nu = nu;
      c.zeta = zeta;
      c.phase = classify_phase(nu, zeta);
      c.exponent = kNaN;
      c.constant = kNaN;
      if (c.phase == Phase::signal_dominated || c.phase == Phase::noise_dominated) {
        c.exponent = c.phase == Phase::signal_dominated ? -zeta : 1.0 / nu - 2.0;
        if (zeta > 0.0) {
          PowerLawSpec spec;
          spec.nu = nu;
          spec.kappa = zeta * nu;
          spec.modes = modes;
          const Spectrum s = build_power_law(spec);
          PowerLawFit fit{1.0, nu, 1.0, zeta * nu, 1, 0.0};
          try {
            c.constant = loss_asymptote(s, p, fit).constant;
          } catch (const Error&) {
            // Unstable at these hyperparameters; constant stays NaN.
          }
        }
      }
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace sgdphase
