// AVX2 variants. Built with -mavx2 but without FMA so each lane performs the
// same rounded operations as the scalar reference.

#include <algorithm>
#include <limits>

#include "elementwise.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace sgdphase::kernels::detail {

namespace {

inline void store_lanes(__m256d x, double out[kLanes]) { _mm256_storeu_pd(out, x); }

inline double hmin(__m256d x) {
  double t[kLanes];
  _mm256_storeu_pd(t, x);
  return std::min(std::min(t[0], t[1]), std::min(t[2], t[3]));
}

}  // namespace

SeStepResult se_step_avx2(std::size_t n, const double* a, const double* m, const double* q,
                          double beta, double tau1, double tau2, double trace_prev, double* c,
                          double* j, double* v) {
  const double t1tr = tau1 * trace_prev;
  const __m256d vb = _mm256_set1_pd(beta);
  const __m256d vt1 = _mm256_set1_pd(t1tr);
  const __m256d vt2 = _mm256_set1_pd(tau2);
  __m256d acc = _mm256_setzero_pd();
  __m256d vmin = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d ak = _mm256_loadu_pd(a + k);
    const __m256d mk = _mm256_loadu_pd(m + k);
    const __m256d qk = _mm256_loadu_pd(q + k);
    const __m256d ck = _mm256_loadu_pd(c + k);
    const __m256d jk = _mm256_loadu_pd(j + k);
    const __m256d vk = _mm256_loadu_pd(v + k);
    const __m256d noise = _mm256_mul_pd(qk, _mm256_sub_pd(vt1, _mm256_mul_pd(vt2, ck)));
    const __m256d bj = _mm256_mul_pd(vb, jk);
    const __m256d bv = _mm256_mul_pd(vb, vk);
    const __m256d r1 = _mm256_add_pd(_mm256_mul_pd(ak, ck), bj);
    const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(ak, jk), bv);
    const __m256d s1 = _mm256_add_pd(_mm256_mul_pd(mk, ck), bj);
    const __m256d s2 = _mm256_add_pd(_mm256_mul_pd(mk, jk), bv);
    const __m256d r2b = _mm256_mul_pd(r2, vb);
    const __m256d cn =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r1, ak), r2b), noise);
    const __m256d jn =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r1, mk), r2b), noise);
    const __m256d vn = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(s1, mk), _mm256_mul_pd(s2, vb)), noise);
    _mm256_storeu_pd(c + k, cn);
    _mm256_storeu_pd(j + k, jn);
    _mm256_storeu_pd(v + k, vn);
    acc = _mm256_add_pd(acc, cn);
    vmin = _mm256_min_pd(vmin, cn);
  }
  double lanes[kLanes];
  store_lanes(acc, lanes);
  double trace = lane_combine(lanes);
  double min_c = hmin(vmin);
  for (; k < n; ++k) {
    const SeMode r = se_mode(a[k], m[k], q[k], beta, t1tr, tau2, c[k], j[k], v[k]);
    c[k] = r.c;
    j[k] = r.j;
    v[k] = r.v;
    min_c = std::min(min_c, r.c);
    trace += r.c;
  }
  return {trace, min_c};
}

GfSums gf_sums_avx2(std::size_t n, const double* lambdas, const double* weights,
                    const GfCoeffs& g) {
  const __m256d p = _mm256_set1_pd(g.p), dp = _mm256_set1_pd(g.dp);
  const __m256d c1 = _mm256_set1_pd(g.c1), dc1 = _mm256_set1_pd(g.dc1);
  const __m256d c2 = _mm256_set1_pd(g.c2), dc2 = _mm256_set1_pd(g.dc2);
  const __m256d nv0 = _mm256_set1_pd(g.nv0), nv1 = _mm256_set1_pd(g.nv1);
  const __m256d dnv0 = _mm256_set1_pd(g.dnv0), dnv1 = _mm256_set1_pd(g.dnv1);
  const __m256d vbeta = _mm256_set1_pd(g.beta), bz1 = _mm256_set1_pd(g.bz1);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d au = _mm256_setzero_pd(), adu = _mm256_setzero_pd();
  __m256d av = _mm256_setzero_pd(), adv = _mm256_setzero_pd();
  __m256d vmin = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d l = _mm256_loadu_pd(lambdas + k);
    const __m256d w = _mm256_loadu_pd(weights + k);
    const __m256d s = _mm256_add_pd(p, _mm256_mul_pd(l, _mm256_add_pd(c1, _mm256_mul_pd(l, c2))));
    const __m256d ds =
        _mm256_add_pd(dp, _mm256_mul_pd(l, _mm256_add_pd(dc1, _mm256_mul_pd(l, dc2))));
    const __m256d nv = _mm256_add_pd(nv0, _mm256_mul_pd(l, nv1));
    const __m256d dnv = _mm256_add_pd(dnv0, _mm256_mul_pd(l, dnv1));
    const __m256d l2 = _mm256_mul_pd(l, l);
    const __m256d inv = _mm256_div_pd(one, s);
    const __m256d inv2 = _mm256_mul_pd(inv, inv);
    au = _mm256_add_pd(au, _mm256_mul_pd(_mm256_mul_pd(l2, bz1), inv));
    const __m256d nu = _mm256_sub_pd(_mm256_mul_pd(vbeta, s), _mm256_mul_pd(bz1, ds));
    adu = _mm256_add_pd(adu, _mm256_mul_pd(_mm256_mul_pd(l2, nu), inv2));
    av = _mm256_add_pd(av, _mm256_mul_pd(_mm256_mul_pd(w, nv), inv));
    const __m256d nd = _mm256_sub_pd(_mm256_mul_pd(dnv, s), _mm256_mul_pd(nv, ds));
    adv = _mm256_add_pd(adv, _mm256_mul_pd(_mm256_mul_pd(w, nd), inv2));
    vmin = _mm256_min_pd(vmin, s);
  }
  double lanes[kLanes];
  GfSums r{};
  store_lanes(au, lanes);
  r.u = lane_combine(lanes);
  store_lanes(adu, lanes);
  r.du = lane_combine(lanes);
  store_lanes(av, lanes);
  r.v = lane_combine(lanes);
  store_lanes(adv, lanes);
  r.dv = lane_combine(lanes);
  double min_s = hmin(vmin);
  for (; k < n; ++k) {
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

RationalSum rational_sum_avx2(std::size_t n, const double* lambdas, double a, double x) {
  const __m256d va = _mm256_set1_pd(a), vx = _mm256_set1_pd(x);
  __m256d acc = _mm256_setzero_pd();
  __m256d vmin = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d l = _mm256_loadu_pd(lambdas + k);
    const __m256d den = _mm256_add_pd(_mm256_mul_pd(va, l), vx);
    vmin = _mm256_min_pd(vmin, den);
    acc = _mm256_add_pd(acc, _mm256_div_pd(l, den));
  }
  double lanes[kLanes];
  store_lanes(acc, lanes);
  double total = lane_combine(lanes);
  double min_den = hmin(vmin);
  for (; k < n; ++k) {
    const double den = a * lambdas[k] + x;
    min_den = std::min(min_den, den);
    total += lambdas[k] / den;
  }
  return {total, min_den};
}

double sum_avx2(std::size_t n, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + k));
  double lanes[kLanes];
  store_lanes(acc, lanes);
  double total = lane_combine(lanes);
  for (; k < n; ++k) total += x[k];
  return total;
}

}  // namespace sgdphase::kernels::detail

#endif  // __AVX2__
