#include <cmath>

#include "sgdphase/errors.hpp"
#include "sgdphase/genfunc.hpp"
#include "sgdphase/kernels.hpp"

namespace sgdphase {

namespace {

kernels::GfCoeffs coefficients(const GenFuncParams& p, double z) {
  const double a = p.alpha, b = p.beta, g = p.tau * p.gamma;
  const double e = 1.0 - z;
  const double f1 = 1.0 - b * z;
  const double f2 = 1.0 - b * b * z;
  kernels::GfCoeffs k{};
  k.p = e * f1 * f2;
  k.dp = -f1 * f2 - b * e * f2 - b * b * e * f1;
  k.c1 = 2.0 * a * (1.0 + b) * z * f1;
  k.dc1 = 2.0 * a * (1.0 + b) * (1.0 - 2.0 * b * z);
  k.c2 = a * a * z * (b * z * (g + 1.0) + g - 1.0);
  k.dc2 = a * a * (2.0 * b * (g + 1.0) * z + g - 1.0);
  k.beta = b;
  k.bz1 = b * z + 1.0;
  k.nv0 = 1.0 - (b + b * b) * z + b * b * b * z * z;
  k.nv1 = 2.0 * a * b * z;
  k.dnv0 = -(b + b * b) + 2.0 * b * b * b * z;
  k.dnv1 = 2.0 * a * b;
  return k;
}

}  // namespace

double eval_S(double alpha, double beta, double g, double lambda, double z) {
  GenFuncParams p{alpha, beta, g, 1.0};
  const auto k = coefficients(p, z);
  return k.p + lambda * (k.c1 + lambda * k.c2);
}

UVValues eval_UV(const Spectrum& spectrum, const GenFuncParams& p, double z) {
  if (!(z >= 0.0 && z < 1.0)) fail(ErrorKind::analysis_domain, "z must lie in [0, 1)");
  const auto k = coefficients(p, z);
  const auto s = kernels::gf_sums(kernels::active_isa(), spectrum.size(), spectrum.lambdas.data(),
                                  spectrum.weights.data(), k);
  if (!(s.min_s > 0.0))
    fail(ErrorKind::analysis_domain, "S(z) is not positive at z = " + std::to_string(z));
  const double pre = p.gamma * p.alpha * p.alpha;
  UVValues out{pre * s.u, pre * s.du, s.v, s.dv};
  if (out.U + z * out.dU < 0.0)
    fail(ErrorKind::analysis_domain, "z U(z) is decreasing at z = " + std::to_string(z));
  return out;
}

U1Value eval_U1(const Spectrum& spectrum, const GenFuncParams& p) {
  // U(1) = gamma alpha (1 + beta) sum lambda / (A lambda + X).
  const double g = p.tau * p.gamma;
  const double A = p.alpha * (p.beta * g + p.beta + g - 1.0);
  const double X = 2.0 * (1.0 - p.beta * p.beta);
  const auto r =
      kernels::rational_sum(kernels::active_isa(), spectrum.size(), spectrum.lambdas.data(), A, X);
  if (!(r.min_den > 0.0)) return {INFINITY, false};
  return {p.gamma * p.alpha * (1.0 + p.beta) * r.sum, true};
}

double eval_V1(const Spectrum& spectrum, const GenFuncParams& p) {
  const double a = p.alpha, b = p.beta, g = p.tau * p.gamma;
  const double A = a * (b * g + b + g - 1.0);
  const double X = 2.0 * (1.0 - b * b);
  double sum = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double l = spectrum.lambdas[k];
    const double den = A * l + X;
    if (!(den > 0.0)) return INFINITY;
    const double num = 2.0 * a * b * l + b * b * b - b * b - b + 1.0;
    sum += spectrum.c0(k) * num / den;
  }
  return sum / a;
}

UVSequences compute_UV_sequences(const Spectrum& spectrum, const GenFuncParams& p,
                                 std::size_t steps) {
  spectrum.validate();
  const std::size_t n = spectrum.size();
  std::vector<double> a(n), m(n), q(n);
  std::vector<double> uc(n), uj(n), uv(n), vc(n), vj(n, 0.0), vv(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double l = spectrum.lambdas[k];
    const double al = p.alpha * l;
    a[k] = 1.0 - al;
    m[k] = -al;
    q[k] = p.gamma * al * al;
    // U starts from lambda^2 * ones, V from lambda C_kk e_11.
    uc[k] = uj[k] = uv[k] = l * l;
    vc[k] = spectrum.weights[k];
  }
  const kernels::Isa isa = kernels::active_isa();
  const double pre = p.gamma * p.alpha * p.alpha;
  UVSequences seq;
  seq.U.reserve(steps);
  seq.V.reserve(steps + 1);
  seq.U.push_back(pre * kernels::sum(isa, n, uc.data()));
  seq.V.push_back(kernels::sum(isa, n, vc.data()));
  // The homogeneous operator is the SE step with tau1 = 0 and tau2 = tau.
  for (std::size_t t = 1; t <= steps; ++t) {
    if (t < steps) {
      const auto ru = kernels::se_step(isa, n, a.data(), m.data(), q.data(), p.beta, 0.0, p.tau,
                                       0.0, uc.data(), uj.data(), uv.data());
      seq.U.push_back(pre * ru.trace);
    }
    const auto rv = kernels::se_step(isa, n, a.data(), m.data(), q.data(), p.beta, 0.0, p.tau,
                                     0.0, vc.data(), vj.data(), vv.data());
    seq.V.push_back(rv.trace);
  }
  if (steps == 0) seq.U.clear();
  return seq;
}

std::vector<double> reconstruct_loss(const UVSequences& seq, std::size_t steps) {
  if (seq.V.size() < steps + 1 || seq.U.size() < steps)
    fail(ErrorKind::invalid_spec, "sequences are shorter than the requested horizon");
  std::vector<double> loss(steps + 1);
  for (std::size_t T = 0; T <= steps; ++T) {
    double s = 0.5 * seq.V[T];
    for (std::size_t t = 1; t <= T; ++t) s += seq.U[T - t] * loss[t - 1];
    loss[T] = s;
  }
  return loss;
}

}  // namespace sgdphase
