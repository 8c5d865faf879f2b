#pragma once

// Per-element formulas shared by every kernel variant, so the vector bodies
// and the scalar tails evaluate exactly the same operation sequence.

#include "sgdphase/kernels.hpp"

namespace sgdphase::kernels::detail {

struct SeMode {
  double c, j, v;
};

inline SeMode se_mode(double a, double m, double q, double beta, double t1tr, double tau2,
                      double c, double j, double v) {
  const double noise = q * (t1tr - tau2 * c);
  const double r1 = a * c + beta * j;
  const double r2 = a * j + beta * v;
  const double s1 = m * c + beta * j;
  const double s2 = m * j + beta * v;
  return {(r1 * a + r2 * beta) + noise, (r1 * m + r2 * beta) + noise,
          (s1 * m + s2 * beta) + noise};
}

struct GfTerms {
  double u, du, v, dv, s;
};

inline GfTerms gf_terms(double l, double w, const GfCoeffs& g) {
  const double s = g.p + l * (g.c1 + l * g.c2);
  const double ds = g.dp + l * (g.dc1 + l * g.dc2);
  const double nv = g.nv0 + l * g.nv1;
  const double dnv = g.dnv0 + l * g.dnv1;
  const double l2 = l * l;
  const double inv = 1.0 / s;
  const double inv2 = inv * inv;
  return {(l2 * g.bz1) * inv, (l2 * (g.beta * s - g.bz1 * ds)) * inv2, (w * nv) * inv,
          (w * (dnv * s - nv * ds)) * inv2, s};
}

inline double lane_combine(const double acc[kLanes]) {
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace sgdphase::kernels::detail
