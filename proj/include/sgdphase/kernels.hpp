#pragma once

#include <cstddef>
#include <string>

namespace sgdphase::kernels {

// Instruction sets with a kernel implementation. The scalar kernels are the
// reference; every other variant must reproduce them bit for bit.
enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);
bool available(Isa isa);
// Chosen once from SGDPHASELAB_ISA (scalar|avx2) or CPU detection.
Isa active_isa();
// Overrides the runtime choice; throws if the ISA is unavailable.
void set_active_isa(Isa isa);

// All reductions use the same order: four interleaved partial sums over the
// largest multiple-of-4 prefix, combined as (s0 + s1) + (s2 + s3), then the
// remaining elements in ascending order.
constexpr std::size_t kLanes = 4;

struct SeStepResult {
  double trace;  // sum of the updated c_k
  double min_c;  // smallest updated c_k
};

/**
 * One step of the per-mode second-moment recursion in output space.
 * Mode k holds (c, j, v) = lambda_k (C_kk, J_kk, V_kk) and is updated by
 * congruence with [[a_k, beta], [m_k, beta]] plus the noise
 * q_k (tau1 * trace_prev - tau2 * c_k) on every entry.
 */
SeStepResult se_step(Isa isa, std::size_t n, const double* a, const double* m, const double* q,
                     double beta, double tau1, double tau2, double trace_prev, double* c,
                     double* j, double* v);

// Per-point coefficients of S(z) = p + lambda (c1 + lambda c2) and of the
// numerators; see genfunc.cpp for their definitions.
struct GfCoeffs {
  double p, dp, c1, dc1, c2, dc2;
  double beta, bz1;                // beta and beta z + 1
  double nv0, nv1, dnv0, dnv1;     // N_V = nv0 + lambda nv1
};

struct GfSums {
  double u;      // sum lambda^2 (beta z + 1) / S
  double du;     // its z-derivative
  double v;      // sum w N_V / S
  double dv;     // its z-derivative
  double min_s;  // smallest S over the modes
};

GfSums gf_sums(Isa isa, std::size_t n, const double* lambdas, const double* weights,
               const GfCoeffs& k);

struct RationalSum {
  double sum;      // sum lambda / (a lambda + x)
  double min_den;  // smallest denominator
};

RationalSum rational_sum(Isa isa, std::size_t n, const double* lambdas, double a, double x);

// Lane-ordered plain sum.
double sum(Isa isa, std::size_t n, const double* x);

namespace detail {
SeStepResult se_step_scalar(std::size_t, const double*, const double*, const double*, double,
                            double, double, double, double*, double*, double*);
GfSums gf_sums_scalar(std::size_t, const double*, const double*, const GfCoeffs&);
RationalSum rational_sum_scalar(std::size_t, const double*, double, double);
double sum_scalar(std::size_t, const double*);
#if defined(SGDPHASE_HAVE_AVX2_TU)
SeStepResult se_step_avx2(std::size_t, const double*, const double*, const double*, double,
                          double, double, double, double*, double*, double*);
GfSums gf_sums_avx2(std::size_t, const double*, const double*, const GfCoeffs&);
RationalSum rational_sum_avx2(std::size_t, const double*, double, double);
double sum_avx2(std::size_t, const double*);
#endif
}  // namespace detail

}  // namespace sgdphase::kernels
