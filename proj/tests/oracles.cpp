#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "sgdphase/rng.hpp"

namespace oracle {

std::vector<std::vector<int>> subsets(int n, int b) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == b) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

namespace {

Eigen::MatrixXd batch_hessian(const sgdphase::FeatureProblem& p, const std::vector<int>& batch) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.psi.rows(), p.psi.rows());
  for (int i : batch) h += p.psi.col(i) * p.psi.col(i).transpose();
  return h / static_cast<double>(batch.size());
}

}  // namespace

Eigen::MatrixXd batch_noise(const sgdphase::FeatureProblem& p, const Eigen::MatrixXd& C, int b) {
  const Eigen::MatrixXd H = p.hessian();
  const auto all = subsets(static_cast<int>(p.samples()), b);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(H.rows(), H.cols());
  for (const auto& batch : all) {
    const Eigen::MatrixXd d = batch_hessian(p, batch) - H;
    acc += d * C * d;
  }
  return acc / static_cast<double>(all.size());
}

std::vector<double> enumerated_moment_losses(const sgdphase::FeatureProblem& p, double alpha,
                                             double beta, int b, int steps) {
  const auto d = p.psi.rows();
  const Eigen::MatrixXd H = p.hessian();
  const auto all = subsets(static_cast<int>(p.samples()), b);
  std::vector<Eigen::MatrixXd> S;
  for (const auto& batch : all) {
    const Eigen::MatrixXd hb = batch_hessian(p, batch);
    Eigen::MatrixXd s(2 * d, 2 * d);
    s << Eigen::MatrixXd::Identity(d, d) - alpha * hb, beta * Eigen::MatrixXd::Identity(d, d),
        -alpha * hb, beta * Eigen::MatrixXd::Identity(d, d);
    S.push_back(s);
  }
  Eigen::VectorXd x(2 * d);
  x << p.initial_error(), Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd M = x * x.transpose();
  std::vector<double> losses;
  auto loss = [&] { return 0.5 * (H.cwiseProduct(M.topLeftCorner(d, d))).sum(); };
  losses.push_back(loss());
  for (int t = 0; t < steps; ++t) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    for (const auto& s : S) next += s * M * s.transpose();
    M = next / static_cast<double>(S.size());
    losses.push_back(loss());
  }
  return losses;
}

Eigen::MatrixXd circulant(const std::vector<std::size_t>& dims, const std::vector<double>& kernel) {
  std::size_t n = 1;
  for (auto v : dims) n *= v;
  auto unravel = [&](std::size_t i) {
    std::vector<std::size_t> idx(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
      idx[k] = i % dims[k];
      i /= dims[k];
    }
    return idx;
  };
  Eigen::MatrixXd K(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto a = unravel(i), b = unravel(j);
      std::size_t off = 0;
      for (std::size_t k = 0; k < dims.size(); ++k)
        off = off * dims[k] + (a[k] + dims[k] - b[k]) % dims[k];
      K(i, j) = kernel[off];
    }
  return K;
}

sgdphase::UVSequences uv_bruteforce(const sgdphase::Spectrum& s, const sgdphase::GenFuncParams& p,
                                    int steps) {
  sgdphase::UVSequences out;
  out.U.assign(steps, 0.0);
  out.V.assign(steps + 1, 0.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double l = s.lambdas[k];
    Eigen::Matrix2d P;
    P << 1 - p.alpha * l, p.beta, -p.alpha * l, p.beta;
    Eigen::Matrix2d E;
    E << 1, 0, 1, 0;
    // vec(X M Y^T) = (Y kron X) vec(M), column-major vec.
    Eigen::Matrix4d PP, EE;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        PP.block<2, 2>(2 * i, 2 * j) = P(i, j) * P;
        EE.block<2, 2>(2 * i, 2 * j) = E(i, j) * E;
      }
    const Eigen::Matrix4d A = PP - p.tau * p.gamma * p.alpha * p.alpha * l * l * EE;
    Eigen::Vector4d u(l, l, l, l);             // lambda * ones
    Eigen::Vector4d v(s.c0(k), 0.0, 0.0, 0.0);  // C_kk e_11
    for (int t = 1; t <= steps + 1; ++t) {
      if (t <= steps) out.U[t - 1] += p.gamma * p.alpha * p.alpha * l * u(0);
      out.V[t - 1] += l * v(0);
      u = A * u;
      v = A * v;
    }
  }
  return out;
}

double s_expanded(double a, double b, double g, double l, double z) {
  const double z2 = z * z, z3 = z2 * z;
  return a * a * b * g * l * l * z2 + a * a * b * l * l * z2 + a * a * g * l * l * z -
         a * a * l * l * z - 2 * a * b * b * l * z2 - 2 * a * b * l * z2 + 2 * a * b * l * z +
         2 * a * l * z - b * b * b * z3 + b * b * b * z2 + b * b * z2 - b * b * z + b * z2 -
         b * z - z + 1;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

sgdphase::Spectrum random_spectrum(std::size_t m, std::uint64_t seed, double lo) {
  sgdphase::CounterRng rng(seed, 7);
  sgdphase::Spectrum s;
  for (std::size_t k = 0; k < m; ++k) {
    s.lambdas.push_back(lo + (1.0 - lo) * rng.uniform());
    s.weights.push_back(0.05 + 0.95 * rng.uniform());
  }
  std::sort(s.lambdas.begin(), s.lambdas.end(), std::greater<>());
  s.lambdas[0] = 1.0;
  return s;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b, double floor) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double den = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / den);
  }
  return worst;
}

}  // namespace oracle
