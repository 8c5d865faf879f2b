#include <cmath>

#include "sgdphase/errors.hpp"
#include "sgdphase/spectrum.hpp"

namespace sgdphase {

namespace {

struct Line {
  double slope;
  double intercept;
  double ssr;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line l{sxy / sxx, 0.0, 0.0};
  l.intercept = my - l.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (l.intercept + l.slope * x[i]);
    l.ssr += r * r;
  }
  return l;
}

double checked_log(double v, const char* what, std::size_t k) {
  if (!(v > 0.0) || !std::isfinite(v))
    fail(ErrorKind::non_loggable, std::string(what) + " at mode " + std::to_string(k) +
                                      " is not positive");
  return std::log(v);
}

}  // namespace

PowerLawFit fit_power_law(const Spectrum& spectrum, std::optional<std::size_t> tail_start,
                          C0Convention convention) {
  const std::size_t m = spectrum.size();
  if (m == 0) fail(ErrorKind::empty_spectrum, "nothing to fit");
  std::size_t start = tail_start.value_or(std::max<std::size_t>(1, m / 10));
  if (start < 1) start = 1;
  if (start > m || m - start + 1 < 8)
    fail(ErrorKind::non_loggable, "fit tail has fewer than 8 modes");

  // Tail sums S_k, accumulated from the smallest eigenvalue upwards.
  std::vector<double> tail(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) tail[i] = tail[i + 1] + spectrum.weights[i];

  std::vector<double> x, ylam, ytarget;
  for (std::size_t k = start; k <= m; ++k) {
    x.push_back(std::log(static_cast<double>(k)));
    ylam.push_back(checked_log(spectrum.lambdas[k - 1], "eigenvalue", k));
    const double t =
        convention == C0Convention::differenced ? tail[k - 1] : spectrum.weights[k - 1];
    ytarget.push_back(checked_log(t, "target weight", k));
  }
  const Line lam = least_squares(x, ylam);
  const Line tgt = least_squares(x, ytarget);

  PowerLawFit fit;
  fit.nu = -lam.slope;
  fit.Lambda = std::exp(lam.intercept);
  if (convention == C0Convention::differenced) {
    fit.kappa = -tgt.slope;
    fit.K = std::exp(tgt.intercept);
  } else {
    fit.kappa = -tgt.slope - 1.0;
    fit.K = std::exp(tgt.intercept) / fit.kappa;
  }
  fit.tail_start = start;
  fit.residual = (lam.ssr + tgt.ssr) / (2.0 * static_cast<double>(x.size()));
  return fit;
}

}  // namespace sgdphase
