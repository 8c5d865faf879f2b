#include <cmath>
#include <numeric>

#include "sgdphase/errors.hpp"
#include "sgdphase/parallel.hpp"
#include "sgdphase/rng.hpp"
#include "sgdphase/simulate.hpp"

namespace sgdphase {

namespace {

// Runs are grouped in fixed chunks whose statistics are merged in chunk order,
// so the floating-point result does not depend on the thread count.
constexpr std::size_t kChunk = 16;

struct Moments {
  std::vector<double> mean;
  std::vector<double> m2;
  std::size_t count = 0;
};

void merge(Moments& into, const Moments& from) {
  if (from.count == 0) return;
  if (into.count == 0) {
    into = from;
    return;
  }
  const double na = static_cast<double>(into.count);
  const double nb = static_cast<double>(from.count);
  const double n = na + nb;
  for (std::size_t t = 0; t < into.mean.size(); ++t) {
    const double delta = from.mean[t] - into.mean[t];
    into.mean[t] += delta * nb / n;
    into.m2[t] += from.m2[t] + delta * delta * na * nb / n;
  }
  into.count += from.count;
}

std::vector<double> single_run(const FeatureProblem& problem, const Eigen::MatrixXd& H,
                               const SGDParams& p, std::uint64_t seed, std::uint64_t run) {
  CounterRng rng(seed, run);
  const std::size_t n = problem.samples();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::VectorXd dw = problem.initial_error();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dw.size());
  Eigen::VectorXd grad(dw.size());
  std::vector<double> losses(p.steps + 1);
  losses[0] = 0.5 * dw.dot(H * dw);
  const double inv_b = 1.0 / static_cast<double>(p.batch);
  for (std::size_t t = 1; t <= p.steps; ++t) {
    // Partial Fisher-Yates: the first b slots become a uniform b-subset.
    for (std::size_t i = 0; i < p.batch; ++i) {
      const std::size_t r = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(perm[i], perm[r]);
    }
    grad.setZero();
    for (std::size_t i = 0; i < p.batch; ++i) {
      const auto col = problem.psi.col(static_cast<Eigen::Index>(perm[i]));
      grad += col.dot(dw) * col;
    }
    v = p.beta * v - (p.alpha * inv_b) * grad;
    dw += v;
    losses[t] = 0.5 * dw.dot(H * dw);
  }
  return losses;
}

}  // namespace

LossTrajectory run_mc(const FeatureProblem& problem, const SGDParams& params, std::size_t runs,
                      std::uint64_t seed, std::size_t threads) {
  params.validate();
  if (runs < 2) fail(ErrorKind::invalid_spec, "need at least 2 runs for a standard error");
  if (params.batch > problem.samples())
    fail(ErrorKind::invalid_batch, "batch exceeds dataset size");
  const Eigen::MatrixXd H = problem.hessian();
  const std::size_t chunks = (runs + kChunk - 1) / kChunk;
  std::vector<Moments> parts(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Moments& m = parts[c];
    m.mean.assign(params.steps + 1, 0.0);
    m.m2.assign(params.steps + 1, 0.0);
    const std::size_t end = std::min(runs, (c + 1) * kChunk);
    for (std::size_t r = c * kChunk; r < end; ++r) {
      const auto losses = single_run(problem, H, params, seed, r);
      ++m.count;
      const double cnt = static_cast<double>(m.count);
      for (std::size_t t = 0; t < losses.size(); ++t) {
        const double delta = losses[t] - m.mean[t];
        m.mean[t] += delta / cnt;
        m.m2[t] += delta * (losses[t] - m.mean[t]);
      }
    }
  });
  Moments total;
  for (const auto& m : parts) merge(total, m);

  LossTrajectory traj;
  const double r = static_cast<double>(runs);
  const double limit = divergence_threshold(total.mean[0]);
  for (std::size_t t = 0; t <= params.steps; ++t) {
    traj.losses.push_back(total.mean[t]);
    traj.stderrs.push_back(std::sqrt(total.m2[t] / (r - 1.0) / r));
    if (t > 0 && (!std::isfinite(total.mean[t]) || total.mean[t] > limit)) {
      traj.diverged_at = t;
      break;
    }
  }
  SGDParams echo = params;
  echo.gamma = gamma_for_batch(problem.samples(), params.batch);
  traj.metadata["regime"] = "mc";
  traj.metadata["params"] = echo.to_json();
  traj.metadata["runs"] = runs;
  traj.metadata["seed"] = seed;
  traj.metadata["rng"] = "philox4x32-10, stream = run index";
  if (traj.diverged_at) traj.metadata["diverged_at"] = *traj.diverged_at;
  return traj;
}

}  // namespace sgdphase
