#include <cstdlib>
#include <cstring>

#include "sgdphase/errors.hpp"
#include "sgdphase/kernels.hpp"

namespace sgdphase::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SGDPHASE_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("SGDPHASELAB_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

Isa& current() {
  static Isa isa = detect();
  return isa;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active_isa() { return current(); }

void set_active_isa(Isa isa) {
  if (!available(isa))
    fail(ErrorKind::config_error, std::string("ISA not available: ") + to_string(isa));
  current() = isa;
}

SeStepResult se_step(Isa isa, std::size_t n, const double* a, const double* m, const double* q,
                     double beta, double tau1, double tau2, double trace_prev, double* c,
                     double* j, double* v) {
#if defined(SGDPHASE_HAVE_AVX2_TU)
  if (isa == Isa::avx2)
    return detail::se_step_avx2(n, a, m, q, beta, tau1, tau2, trace_prev, c, j, v);
#endif
  (void)isa;
  return detail::se_step_scalar(n, a, m, q, beta, tau1, tau2, trace_prev, c, j, v);
}

GfSums gf_sums(Isa isa, std::size_t n, const double* lambdas, const double* weights,
               const GfCoeffs& k) {
#if defined(SGDPHASE_HAVE_AVX2_TU)
  if (isa == Isa::avx2) return detail::gf_sums_avx2(n, lambdas, weights, k);
#endif
  (void)isa;
  return detail::gf_sums_scalar(n, lambdas, weights, k);
}

RationalSum rational_sum(Isa isa, std::size_t n, const double* lambdas, double a, double x) {
#if defined(SGDPHASE_HAVE_AVX2_TU)
  if (isa == Isa::avx2) return detail::rational_sum_avx2(n, lambdas, a, x);
#endif
  (void)isa;
  return detail::rational_sum_scalar(n, lambdas, a, x);
}

double sum(Isa isa, std::size_t n, const double* x) {
#if defined(SGDPHASE_HAVE_AVX2_TU)
  if (isa == Isa::avx2) return detail::sum_avx2(n, x);
#endif
  (void)isa;
  return detail::sum_scalar(n, x);
}

}  // namespace sgdphase::kernels
