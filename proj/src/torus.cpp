#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sgdphase/errors.hpp"
#include "sgdphase/spectrum.hpp"

namespace sgdphase {

namespace {

std::size_t grid_size(const std::vector<std::size_t>& dims) {
  if (dims.empty()) fail(ErrorKind::invalid_spec, "torus needs at least one dimension");
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d < 1) fail(ErrorKind::invalid_spec, "torus side length must be positive");
    n *= d;
  }
  return n;
}

std::vector<std::size_t> unravel(std::size_t i, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> idx(dims.size());
  for (std::size_t d = dims.size(); d-- > 0;) {
    idx[d] = i % dims[d];
    i /= dims[d];
  }
  return idx;
}

// Phase matrix entries 2 pi sum_d k_d m_d / N_d, reduced mod N_d first so the
// angle stays in [0, 2 pi * ndims).
Eigen::MatrixXd phases(const std::vector<std::size_t>& dims) {
  const std::size_t n = grid_size(dims);
  std::vector<std::vector<std::size_t>> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = unravel(i, dims);
  Eigen::MatrixXd ph(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t m = 0; m < n; ++m) {
      double a = 0.0;
      for (std::size_t d = 0; d < dims.size(); ++d)
        a += static_cast<double>((idx[k][d] * idx[m][d]) % dims[d]) /
             static_cast<double>(dims[d]);
      ph(k, m) = 2.0 * std::numbers::pi * a;
    }
  return ph;
}

std::size_t negate_index(std::size_t i, const std::vector<std::size_t>& dims) {
  auto idx = unravel(i, dims);
  std::size_t out = 0;
  for (std::size_t d = 0; d < dims.size(); ++d)
    out = out * dims[d] + (dims[d] - idx[d]) % dims[d];
  return out;
}

}  // namespace

std::vector<double> torus_eigenvalues(const std::vector<std::size_t>& dims,
                                      const std::vector<double>& kernel) {
  const std::size_t n = grid_size(dims);
  if (kernel.size() != n)
    fail(ErrorKind::invalid_spec, "kernel has " + std::to_string(kernel.size()) +
                                      " values, grid has " + std::to_string(n));
  double kmax = 0.0;
  for (double v : kernel) kmax = std::max(kmax, std::abs(v));
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(kernel[i] - kernel[negate_index(i, dims)]) > 1e-12 * kmax)
      fail(ErrorKind::invalid_spec, "kernel is not symmetric under x -> -x");

  const Eigen::MatrixXd ph = phases(dims);
  std::vector<double> lam(n);
  double lmax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += kernel[m] * std::cos(ph(k, m));
    lam[k] = s;
    lmax = std::max(lmax, s);
  }
  for (std::size_t k = 0; k < n; ++k)
    if (lam[k] < -1e-10 * lmax)
      fail(ErrorKind::non_psd_kernel, "Fourier coefficient " + std::to_string(k) + " is " +
                                          std::to_string(lam[k]));
  return lam;
}

TorusProblem build_torus_problem(const std::vector<std::size_t>& dims,
                                 const std::vector<double>& kernel,
                                 const Eigen::VectorXd& w_star, const Eigen::VectorXd& w0) {
  TorusProblem tp;
  tp.dims = dims;
  tp.fourier_eigenvalues = torus_eigenvalues(dims, kernel);
  const std::size_t n = tp.fourier_eigenvalues.size();
  const auto ni = static_cast<Eigen::Index>(n);
  if (w_star.size() != ni || w0.size() != ni)
    fail(ErrorKind::invalid_spec, "w* and w0 must have one entry per grid point");

  const Eigen::MatrixXd ph = phases(dims);
  const double nd = static_cast<double>(n);

  // First column of K^{1/2}; the full matrix is circulant in the grid index.
  std::vector<double> root(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      s += std::sqrt(std::max(tp.fourier_eigenvalues[k], 0.0)) * std::cos(ph(k, m));
    root[m] = s / nd;
  }
  tp.features.psi.resize(ni, ni);
  const double sqrt_n = std::sqrt(nd);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = unravel(i, dims);
    for (std::size_t j = 0; j < n; ++j) {
      const auto b = unravel(j, dims);
      std::size_t diff = 0;
      for (std::size_t d = 0; d < dims.size(); ++d)
        diff = diff * dims[d] + (a[d] + dims[d] - b[d]) % dims[d];
      tp.features.psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sqrt_n * root[diff];
    }
  }
  tp.features.w_star = w_star;
  tp.features.w0 = w0;

  const Eigen::VectorXd dw = w0 - w_star;
  const double lmax =
      *std::max_element(tp.fourier_eigenvalues.begin(), tp.fourier_eigenvalues.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return tp.fourier_eigenvalues[x] > tp.fourier_eigenvalues[y];
  });
  for (std::size_t k : order) {
    const double lam = tp.fourier_eigenvalues[k];
    if (!(lam > 1e-12 * lmax)) continue;
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      re += dw(static_cast<Eigen::Index>(i)) * std::cos(ph(k, i));
      im += dw(static_cast<Eigen::Index>(i)) * std::sin(ph(k, i));
    }
    tp.spectrum.lambdas.push_back(lam);
    tp.spectrum.weights.push_back(lam * (re * re + im * im) / nd);
    tp.spectrum_order.push_back(k);
  }
  if (tp.spectrum.lambdas.empty()) fail(ErrorKind::empty_spectrum, "kernel is zero");
  tp.spectrum.dataset_size = n;
  return tp;
}

std::vector<double> TorusProblem::fourier_diagonal(const Eigen::MatrixXd& a) const {
  const Eigen::MatrixXd ph = phases(dims);
  const Eigen::MatrixXd c = ph.array().cos().matrix().transpose();
  const Eigen::MatrixXd s = ph.array().sin().matrix().transpose();
  // For symmetric A the imaginary part of f^H A f cancels.
  const Eigen::VectorXd diag =
      ((c.transpose() * a * c).diagonal() + (s.transpose() * a * s).diagonal()) /
      static_cast<double>(samples());
  return std::vector<double>(diag.data(), diag.data() + diag.size());
}

std::vector<double> TorusProblem::spectrum_diagonal(const Eigen::MatrixXd& a) const {
  const auto full = fourier_diagonal(a);
  std::vector<double> out;
  out.reserve(spectrum_order.size());
  for (std::size_t k : spectrum_order) out.push_back(full[k]);
  return out;
}

}  // namespace sgdphase
