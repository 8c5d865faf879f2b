#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sgdphase/errors.hpp"
#include "sgdphase/genfunc.hpp"
#include "sgdphase/rng.hpp"
#include "sgdphase/simulate.hpp"

using namespace sgdphase;

namespace {

Spectrum equal_modes(std::size_t n, double lambda, double c0 = 1.0) {
  Spectrum s;
  s.lambdas.assign(n, lambda);
  s.weights.assign(n, lambda * c0);
  return s;
}

GenFuncParams gp(double alpha, double beta, double gamma, double tau = 1.0) {
  return {alpha, beta, gamma, tau};
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::config_error;
}

// A random context inside the analysis window.
GenFuncParams random_context(CounterRng& rng, double lambda_max) {
  GenFuncParams p;
  p.beta = -0.5 + 1.4 * rng.uniform();
  p.alpha = (0.02 + 0.96 * rng.uniform()) * 2.0 * (1.0 + p.beta) / lambda_max;
  p.gamma = 0.05 + 0.95 * rng.uniform();
  p.tau = 0.05 + 0.95 * rng.uniform();
  return p;
}

}  // namespace

TEST_SUITE("genfunc") {

TEST_CASE("S polynomial examples") {
  CounterRng rng(1, 1);
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform() * 3, b = rng.uniform() * 1.8 - 0.9, g = rng.uniform();
    CHECK(eval_S(a, b, g, rng.uniform(), 0.0) == 1.0);
  }
  CHECK(eval_S(1.0, 0.0, 1.0, 1.0, 0.5) == doctest::Approx(1.5).epsilon(1e-15));
  for (double z : {0.1, 0.5, 0.9})
    CHECK(eval_S(0.7, 0.4, 0.3, 0.0, z) ==
          doctest::Approx((1 - z) * (1 - 0.4 * z) * (1 - 0.16 * z)).epsilon(1e-15));
}

TEST_CASE("S matches the expanded polynomial") {
  CounterRng rng(2, 1);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.uniform() * 3, b = rng.uniform() * 1.8 - 0.9, g = rng.uniform();
    const double l = rng.uniform() * 2, z = rng.uniform();
    const double e = oracle::s_expanded(a, b, g, l, z);
    CHECK(std::abs(eval_S(a, b, g, l, z) - e) <= 1e-13 * std::max(1.0, std::abs(e)) + 1e-14);
  }
}

TEST_CASE("U and V at z = 0") {
  const auto s = oracle::random_spectrum(30, 3);
  const auto p = gp(0.6, 0.3, 0.4, 0.8);
  const auto uv = eval_UV(s, p, 0.0);
  CHECK(uv.U == doctest::Approx(0.4 * 0.36 * s.trace_sq()).epsilon(1e-14));
  CHECK(uv.V == doctest::Approx(2.0 * s.initial_loss()).epsilon(1e-14));
  CHECK(eval_UV(s, gp(0.6, 0.3, 0.0), 0.7).U == 0.0);
}

TEST_CASE("single mode collapses to 1.44 / (1 + 1.4 z)") {
  const auto s = equal_modes(1, 1.0);
  for (double z : {0.0, 0.2, 0.5, 0.9, 0.999})
    CHECK(eval_UV(s, gp(1.2, 0.0, 1.0), z).U == doctest::Approx(1.44 / (1 + 1.4 * z)).epsilon(1e-14));
}

TEST_CASE("analytic derivatives agree with finite differences") {
  CounterRng rng(4, 1);
  for (int i = 0; i < 20; ++i) {
    const auto s = oracle::random_spectrum(15, 100 + i);
    const auto p = random_context(rng, 1.0);
    for (double z : {0.2, 0.5, 0.8}) {
      const double h = 1e-6;
      UVValues lo, hi, mid;
      try {
        lo = eval_UV(s, p, z - h);
        hi = eval_UV(s, p, z + h);
        mid = eval_UV(s, p, z);
      } catch (const Error&) {
        continue;  // z past a root of S
      }
      CHECK(mid.dU == doctest::Approx((hi.U - lo.U) / (2 * h)).epsilon(1e-6));
      CHECK(mid.dV == doctest::Approx((hi.V - lo.V) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("z outside [0, 1) is rejected") {
  const auto s = equal_modes(2, 1.0);
  CHECK(kind_of([&] { eval_UV(s, gp(0.5, 0.0, 1.0), 1.0); }) == ErrorKind::analysis_domain);
  CHECK(kind_of([&] { eval_UV(s, gp(0.5, 0.0, 1.0), -0.1); }) == ErrorKind::analysis_domain);
}

TEST_CASE("U(1) examples") {
  const auto u = eval_U1(equal_modes(1, 1.0), gp(1.0, 0.0, 1.0));
  CHECK(u.finite);
  CHECK(u.value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_U1(equal_modes(2, 1.0), gp(1.2, 0.0, 1.0)).value == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(eval_U1(equal_modes(2, 1.0), gp(1.2, 0.0, 0.0)).value == 0.0);
}

TEST_CASE("U(1) and V(1) are the z -> 1 limits") {
  CounterRng rng(5, 1);
  int checked = 0;
  for (int i = 0; i < 30; ++i) {
    const auto s = oracle::random_spectrum(25, 200 + i);
    const auto p = random_context(rng, 1.0);
    const auto u1 = eval_U1(s, p);
    if (!u1.finite) continue;
    UVValues near;
    try {
      near = eval_UV(s, p, 1.0 - 1e-8);
    } catch (const Error&) {
      continue;
    }
    CHECK(near.U == doctest::Approx(u1.value).epsilon(1e-6));
    CHECK(near.V == doctest::Approx(eval_V1(s, p)).epsilon(1e-6));
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("S is positive and z U(z) increases inside the analysis window") {
  CounterRng rng(6, 1);
  for (int i = 0; i < 25; ++i) {
    const auto s = oracle::random_spectrum(20, 300 + i);
    const auto p = random_context(rng, 1.0);
    double prev = -1.0;
    for (int j = 1; j <= 200; ++j) {
      const double z = j / 201.0;
      for (std::size_t k = 0; k < s.size(); ++k)
        CHECK(eval_S(p.alpha, p.beta, p.tau * p.gamma, s.lambdas[k], z) > 0.0);
      const double zu = z * eval_UV(s, p, z).U;
      CHECK(zu >= prev);
      prev = zu;
    }
  }
}

TEST_CASE("lambda_crit examples") {
  CHECK(solve_lambda_crit(equal_modes(1, 0.7), 1.0) == 0.0);
  CHECK(solve_lambda_crit(equal_modes(2, 0.7), 1.0) == doctest::Approx(0.7).epsilon(1e-11));
  const auto s = oracle::random_spectrum(40, 7);
  CHECK(solve_lambda_crit(s, 0.0) == doctest::Approx(s.trace()).epsilon(1e-11));
  const double x = solve_lambda_crit(s, 0.6);
  double f = 0.0;
  for (double l : s.lambdas) f += l / (0.6 * l + x);
  CHECK(std::abs(f - 1.0) <= 1e-10);
}

TEST_CASE("stability report") {
  const auto s = oracle::random_spectrum(30, 8);
  const auto quiet = stability_report(s, gp(1.5, 0.0, 0.0));
  CHECK(quiet.converges);
  CHECK(quiet.U1 == 0.0);

  const auto two = stability_report(equal_modes(2, 1.0), gp(1.2, 0.0, 1.0));
  CHECK(two.U1 == doctest::Approx(1.2));
  CHECK_FALSE(two.converges);

  const auto out = stability_report(s, gp(0.5, 1.5, 1.0));
  CHECK_FALSE(out.in_domain);
  CHECK_FALSE(out.converges);
  CHECK(out.to_json()["U1"] == "nan");

  const auto flags = stability_report(s, gp(0.1, 0.0, 0.1), 0.4);
  CHECK(flags.immediate_divergence);
  CHECK_FALSE(stability_report(s, gp(0.1, 0.0, 0.1), 0.8).immediate_divergence);
  CHECK(stability_report(s, gp(0.1, 0.0, 0.1), 0.8).eventual_divergence);
}

TEST_CASE("critical alpha is where U(1) crosses 1") {
  const auto s = oracle::random_spectrum(50, 9);
  for (double beta : {-0.3, 0.0, 0.5, 0.9}) {
    const auto p = gp(0.1, beta, 0.3);
    const double ac = critical_alpha(s, p);
    GenFuncParams below = p, above = p;
    below.alpha = ac * (1 - 1e-9);
    above.alpha = ac * (1 + 1e-9);
    CHECK(eval_U1(s, below).value < 1.0);
    if (ac < 2.0 * (1 + beta) / s.lambda_max()) CHECK(eval_U1(s, above).value >= 1.0 - 1e-12);
  }
}

TEST_CASE("alpha_eff bound tightens as beta -> 1") {
  const auto s = oracle::random_spectrum(60, 10);
  for (double beta : {0.9, 0.99, 0.999}) {
    const auto r = stability_report(s, gp(0.01, beta, 0.5, 0.8));
    CHECK(r.alpha_eff_critical <= r.alpha_eff_bound * (1 + 1e-12));
    CHECK(r.tightness >= -1e-12);
    CHECK(r.tightness <= r.tightness_limit);
  }
}

TEST_CASE("divergence radius for two equal modes") {
  const auto s = equal_modes(2, 1.0);
  const auto p = gp(1.2, 0.0, 1.0);
  const auto d = solve_divergence(s, p);
  CHECK(d.r_L == doctest::Approx(1.0 / 1.48).epsilon(1e-12));
  CHECK(std::abs(d.r_L * eval_UV(s, p, d.r_L).U - 1.0) <= 1e-12);
  CHECK(d.t_div == doctest::Approx(-1.0 / std::log(1.0 / 1.48)).epsilon(1e-10));
  CHECK(d.prefactor > 0.0);

  SGDParams sp;
  sp.alpha = 1.2;
  sp.gamma = 1.0;
  sp.steps = std::size_t(std::ceil(10 * d.t_div));
  const auto traj = run_se(s, sp);
  const std::size_t t0 = std::size_t(std::round(5 * d.t_div));
  const std::size_t t1 = traj.losses.size() - 1;
  const double slope = (std::log(traj.losses[t1]) - std::log(traj.losses[t0])) / double(t1 - t0);
  CHECK(slope == doctest::Approx(-std::log(d.r_L)).epsilon(0.05));
}

TEST_CASE("divergence analysis errors") {
  const auto s = equal_modes(2, 1.0);
  CHECK(kind_of([&] { solve_divergence(s, gp(0.5, 0.0, 1.0)); }) == ErrorKind::not_divergent);
  CHECK(kind_of([&] { solve_divergence(s, gp(2.5, 0.0, 1.0)); }) == ErrorKind::analysis_domain);
}

TEST_CASE("U(1) > 1 exactly when the SE run diverges") {
  CounterRng rng(11, 1);
  int divergent = 0, convergent = 0;
  for (int i = 0; i < 60; ++i) {
    const auto s = oracle::random_spectrum(20, 400 + i, 0.05);
    const auto p = random_context(rng, 1.0);
    const auto u1 = eval_U1(s, p);
    if (std::abs(u1.value - 1.0) < 0.05) continue;
    SGDParams sp{p.alpha, p.beta, p.gamma, 1.0, p.tau, 0, 1};
    if (u1.value > 1.0) {
      const auto d = solve_divergence(s, p);
      sp.steps = std::size_t(std::ceil(50 * d.t_div)) + 10;
      CHECK(run_se(s, sp).diverged_at.has_value());
      ++divergent;
    } else {
      sp.steps = 5000;
      const auto t = run_se(s, sp);
      CHECK_FALSE(t.diverged_at.has_value());
      CHECK(t.final_loss() < t.losses[0]);
      ++convergent;
    }
  }
  CHECK(divergent >= 5);
  CHECK(convergent >= 5);
}

TEST_CASE("sequences match the 4x4 operator brute force") {
  const auto s = oracle::random_spectrum(12, 12);
  const auto p = gp(0.8, 0.4, 0.6, 0.7);
  const auto seq = compute_UV_sequences(s, p, 60);
  const auto bf = oracle::uv_bruteforce(s, p, 60);
  CHECK(oracle::max_rel_diff(seq.U, bf.U, 1e-200) <= 1e-11);
  CHECK(oracle::max_rel_diff(seq.V, bf.V, 1e-200) <= 1e-11);
  CHECK(seq.U[0] == doctest::Approx(0.6 * 0.64 * s.trace_sq()).epsilon(1e-14));
  CHECK(seq.V[0] == doctest::Approx(2 * s.initial_loss()).epsilon(1e-14));
}

TEST_CASE("sequence partial sums reproduce the generating functions") {
  const auto s = oracle::random_spectrum(20, 13);
  const auto p = gp(0.5, 0.3, 0.5, 1.0);
  const auto seq = compute_UV_sequences(s, p, 400);
  for (double z : {0.25, 0.5, 0.75}) {
    double u = 0, v = 0, zp = 1;
    for (std::size_t t = 0; t < 400; ++t, zp *= z) {
      u += seq.U[t] * zp;
      v += seq.V[t] * zp;
    }
    const auto uv = eval_UV(s, p, z);
    CHECK(u == doctest::Approx(uv.U).epsilon(1e-10));
    CHECK(v == doctest::Approx(uv.V).epsilon(1e-10));
  }
}

TEST_CASE("reconstructed loss equals the SE simulator") {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const auto s = oracle::random_spectrum(20, seed);
    CounterRng rng(seed, 2);
    const auto p = random_context(rng, 1.0);
    SGDParams sp{p.alpha, p.beta, p.gamma, 1.0, p.tau, 200, 1};
    const auto se = run_se(s, sp);
    const auto rec = reconstruct_loss(compute_UV_sequences(s, p, 200), 200);
    const std::size_t n = se.losses.size();
    CHECK(oracle::max_rel_diff(std::vector<double>(rec.begin(), rec.begin() + n), se.losses) <= 1e-10);
  }
  const auto s = oracle::random_spectrum(10, 30);
  const auto seq = compute_UV_sequences(s, gp(0.5, 0.2, 0.0), 50);
  const auto rec = reconstruct_loss(seq, 50);
  CHECK(rec[0] == doctest::Approx(s.initial_loss()).epsilon(1e-15));
  for (std::size_t t = 0; t <= 50; ++t) CHECK(rec[t] == 0.5 * seq.V[t]);
}

}  // TEST_SUITE
