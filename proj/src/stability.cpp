#include <cmath>
#include <limits>

#include "sgdphase/errors.hpp"
#include "sgdphase/genfunc.hpp"
#include "sgdphase/kernels.hpp"
#include "sgdphase/simulate.hpp"

namespace sgdphase {

double solve_lambda_crit(const Spectrum& spectrum, double tau) {
  spectrum.validate();
  if (!(tau >= 0.0)) fail(ErrorKind::invalid_spec, "tau must be non-negative");
  const auto isa = kernels::active_isa();
  const std::size_t n = spectrum.size();
  const double* l = spectrum.lambdas.data();
  const double total = kernels::sum(isa, n, l);
  const double tol = 1e-12 * spectrum.lambda_max();
  auto f = [&](double x) { return kernels::rational_sum(isa, n, l, tau, x).sum; };
  // f decreases in x and f(total) <= 1; no positive root if f(0+) <= 1.
  if (f(tol) <= 1.0) return 0.0;
  return bisect(0.0, total, tol, [&](double x) { return f(x) <= 1.0; });
}

double critical_alpha(const Spectrum& spectrum, const GenFuncParams& p) {
  const double a_max = 2.0 * (1.0 + p.beta) / spectrum.lambda_max();
  auto unstable = [&](double a) {
    GenFuncParams q = p;
    q.alpha = a;
    const auto u = eval_U1(spectrum, q);
    return !u.finite || u.value >= 1.0;
  };
  // Just below the noiseless bound; nothing to bisect if that is stable.
  const double top = a_max * (1.0 - 1e-15);
  if (!unstable(top)) return a_max;
  return bisect(0.0, top, 1e-14 * a_max, unstable);
}

StabilityReport stability_report(const Spectrum& spectrum, const GenFuncParams& p,
                                 std::optional<double> tail_nu) {
  StabilityReport r;
  if (!(p.beta > -1.0 && p.beta < 1.0)) {
    r.in_domain = false;
    r.domain_note = "beta outside (-1, 1)";
  } else if (!(p.alpha > 0.0)) {
    r.in_domain = false;
    r.domain_note = "alpha not positive";
  } else if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) {
    r.in_domain = false;
    r.domain_note = "gamma outside [0, 1]";
  }
  if (tail_nu) {
    r.immediate_divergence = *tail_nu <= 0.5;
    r.eventual_divergence = *tail_nu > 0.5 && *tail_nu <= 1.0;
  }
  if (!r.in_domain) {
    r.U1 = std::numeric_limits<double>::quiet_NaN();
    r.U1_finite = false;
    return r;
  }
  spectrum.validate();
  r.noiseless_stable = p.alpha < 2.0 * (1.0 + p.beta) / spectrum.lambda_max();
  const auto u = eval_U1(spectrum, p);
  r.U1 = u.value;
  r.U1_finite = u.finite;
  r.converges = r.noiseless_stable && u.finite && u.value < 1.0;
  r.lambda_crit = solve_lambda_crit(spectrum, p.tau);
  r.alpha_eff = p.alpha / (1.0 - p.beta);
  const double gl = p.gamma * r.lambda_crit;
  r.alpha_eff_bound = gl > 0.0 ? 2.0 / gl : INFINITY;
  r.alpha_critical = critical_alpha(spectrum, p);
  r.alpha_eff_critical = r.alpha_critical / (1.0 - p.beta);
  r.tightness = r.alpha_eff_bound / r.alpha_eff_critical - 1.0;
  r.tightness_limit = gl > 0.0 ? (spectrum.lambda_max() / r.lambda_crit) * (1.0 - p.beta) /
                                     (p.gamma * (1.0 + p.beta))
                               : INFINITY;
  return r;
}

nlohmann::json StabilityReport::to_json() const {
  nlohmann::json j;
  j["in_domain"] = in_domain;
  if (!domain_note.empty()) j["domain_note"] = domain_note;
  j["noiseless_stable"] = noiseless_stable;
  j["U1"] = json_number(U1);
  j["U1_finite"] = U1_finite;
  j["converges"] = converges;
  j["lambda_crit"] = json_number(lambda_crit);
  j["alpha_eff"] = json_number(alpha_eff);
  j["alpha_eff_bound"] = json_number(alpha_eff_bound);
  j["alpha_eff_critical"] = json_number(alpha_eff_critical);
  j["alpha_critical"] = json_number(alpha_critical);
  j["tightness"] = json_number(tightness);
  j["tightness_limit"] = json_number(tightness_limit);
  j["immediate_divergence"] = immediate_divergence;
  j["eventual_divergence"] = eventual_divergence;
  return j;
}

DivergenceReport solve_divergence(const Spectrum& spectrum, const GenFuncParams& p) {
  spectrum.validate();
  if (!(p.beta > -1.0 && p.beta < 1.0) || !(p.alpha > 0.0) ||
      !(p.alpha < 2.0 * (1.0 + p.beta) / spectrum.lambda_max()))
    fail(ErrorKind::analysis_domain, "outside the noiseless-stable window");
  const auto u1 = eval_U1(spectrum, p);
  if (u1.finite && u1.value <= 1.0)
    fail(ErrorKind::not_divergent, "U(1) = " + std::to_string(u1.value) + " <= 1");

  // Past a zero of S the function z U(z) has already crossed 1 from below.
  auto upper = [&](double z) {
    try {
      const auto uv = eval_UV(spectrum, p, z);
      return z * uv.U >= 1.0;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::analysis_domain) return true;
      throw;
    }
  };
  DivergenceReport d;
  d.r_L = bisect(0.0, 1.0, 1e-15, upper);
  if (!(d.r_L > 0.0 && d.r_L < 1.0)) fail(ErrorKind::no_root, "no root of z U(z) = 1");
  d.t_div = -1.0 / std::log(d.r_L);
  const auto uv = eval_UV(spectrum, p, d.r_L);
  d.prefactor = uv.V / (2.0 * (1.0 + d.r_L * d.r_L * uv.dU));
  return d;
}

nlohmann::json DivergenceReport::to_json() const {
  return {{"r_L", json_number(r_L)},
          {"t_div", json_number(t_div)},
          {"prefactor", json_number(prefactor)}};
}

}  // namespace sgdphase
