#include <algorithm>
#include <limits>

#include "elementwise.hpp"

namespace sgdphase::kernels::detail {

SeStepResult se_step_scalar(std::size_t n, const double* a, const double* m, const double* q,
                            double beta, double tau1, double tau2, double trace_prev, double* c,
                            double* j, double* v) {
  const double t1tr = tau1 * trace_prev;
  double acc[kLanes] = {};
  double min_c = std::numeric_limits<double>::infinity();
  const std::size_t body = n - n % kLanes;
  double trace = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == body) trace = lane_combine(acc);
    const SeMode r = se_mode(a[k], m[k], q[k], beta, t1tr, tau2, c[k], j[k], v[k]);
    c[k] = r.c;
    j[k] = r.j;
    v[k] = r.v;
    min_c = std::min(min_c, r.c);
    if (k < body)
      acc[k % kLanes] += r.c;
    else
      trace += r.c;
  }
  if (body == n) trace = lane_combine(acc);
  return {trace, min_c};
}

GfSums gf_sums_scalar(std::size_t n, const double* lambdas, const double* weights,
                      const GfCoeffs& g) {
  double au[kLanes] = {}, adu[kLanes] = {}, av[kLanes] = {}, adv[kLanes] = {};
  double min_s = std::numeric_limits<double>::infinity();
  const std::size_t body = n - n % kLanes;
  for (std::size_t k = 0; k < body; ++k) {
    const GfTerms t = gf_terms(lambdas[k], weights[k], g);
    const std::size_t lane = k % kLanes;
    au[lane] += t.u;
    adu[lane] += t.du;
    av[lane] += t.v;
    adv[lane] += t.dv;
    min_s = std::min(min_s, t.s);
  }
  GfSums r{lane_combine(au), lane_combine(adu), lane_combine(av), lane_combine(adv), 0.0};
  for (std::size_t k = body; k < n; ++k) {
    const GfTerms t = gf_terms(lambdas[k], weights[k], g);
    r.u += t.u;
    r.du += t.du;
    r.v += t.v;
    r.dv += t.dv;
    min_s = std::min(min_s, t.s);
  }
  r.min_s = min_s;
  return r;
}

RationalSum rational_sum_scalar(std::size_t n, const double* lambdas, double a, double x) {
  double acc[kLanes] = {};
  double min_den = std::numeric_limits<double>::infinity();
  const std::size_t body = n - n % kLanes;
  for (std::size_t k = 0; k < body; ++k) {
    const double den = a * lambdas[k] + x;
    min_den = std::min(min_den, den);
    acc[k % kLanes] += lambdas[k] / den;
  }
  double total = lane_combine(acc);
  for (std::size_t k = body; k < n; ++k) {
    const double den = a * lambdas[k] + x;
    min_den = std::min(min_den, den);
    total += lambdas[k] / den;
  }
  return {total, min_den};
}

double sum_scalar(std::size_t n, const double* x) {
  double acc[kLanes] = {};
  const std::size_t body = n - n % kLanes;
  for (std::size_t k = 0; k < body; ++k) acc[k % kLanes] += x[k];
  double total = lane_combine(acc);
  for (std::size_t k = body; k < n; ++k) total += x[k];
  return total;
}

}  // namespace sgdphase::kernels::detail
