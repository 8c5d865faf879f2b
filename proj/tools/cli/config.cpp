#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <iostream>

#include <CLI11.hpp>

#include "sgdphase/errors.hpp"

namespace sgdcli {

using sgdphase::ErrorKind;
using sgdphase::fail;

namespace {

double parse_double(const std::string& s, const std::string& what) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    fail(ErrorKind::config_error, "cannot read " + what + " from '" + s + "'");
  return v;
}

}  // namespace

std::vector<double> Grid::values() const {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::string Grid::to_string() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g:%.17g:%zu", lo, hi, n);
  return buf;
}

Grid parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) fail(ErrorKind::config_error, "grid must be lo:hi:n, got '" + text + "'");
  Grid g;
  g.lo = parse_double(text.substr(0, a), "grid lower end");
  g.hi = parse_double(text.substr(a + 1, b - a - 1), "grid upper end");
  const double n = parse_double(text.substr(b + 1), "grid size");
  if (!(n >= 1) || n != std::floor(n)) fail(ErrorKind::config_error, "grid size must be a positive integer");
  if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || g.hi < g.lo)
    fail(ErrorKind::config_error, "grid needs finite lo <= hi");
  g.n = static_cast<std::size_t>(n);
  return g;
}

const char* to_string(Source source) {
  switch (source) {
    case Source::power_law: return "power_law";
    case Source::csv: return "csv";
    case Source::torus: return "torus";
    case Source::features: return "features";
  }
  return "unknown";
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"simulate",      "stability-map", "asymptotics",
                                                 "divergence",    "phase-diagram", "fit",
                                                 "se-error"};
  return names;
}

Source ExperimentConfig::source() const {
  std::vector<Source> found;
  if (nu || kappa) found.push_back(Source::power_law);
  if (!csv.empty()) found.push_back(Source::csv);
  if (torus) found.push_back(Source::torus);
  if (features || samples) found.push_back(Source::features);
  if (found.size() > 1) {
    std::string names;
    for (Source s : found) names += std::string(names.empty() ? "" : ", ") + sgdcli::to_string(s);
    fail(ErrorKind::config_error, "conflicting problem sources: " + names);
  }
  if (found.empty()) {
    if (command == "phase-diagram") return Source::power_law;
    fail(ErrorKind::config_error,
         "no problem source: give --nu/--kappa, --csv, --torus or --features/--samples");
  }
  return found.front();
}

sgdphase::C0Convention ExperimentConfig::c0_convention() const {
  return convention == "pointwise" ? sgdphase::C0Convention::pointwise
                                   : sgdphase::C0Convention::differenced;
}

std::optional<std::size_t> ExperimentConfig::effective_dataset_size() const {
  if (dataset_size) return dataset_size;
  if (command == "phase-diagram") return std::nullopt;
  switch (source()) {
    case Source::torus: return torus;
    case Source::features: return samples;
    default: return std::nullopt;
  }
}

double ExperimentConfig::gamma() const {
  return sgdphase::gamma_for_batch(effective_dataset_size(), batch);
}

sgdphase::SGDParams ExperimentConfig::sgd_params() const {
  sgdphase::SGDParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma();
  p.tau1 = tau1;
  p.tau2 = tau2;
  p.steps = steps;
  p.batch = batch;
  return p;
}

void ExperimentConfig::validate() const {
  bool known = false;
  for (const auto& c : command_names()) known = known || c == command;
  if (!known) fail(ErrorKind::config_error, "unknown command '" + command + "'");
  const Source src = source();
  if (src == Source::power_law && command != "phase-diagram" && (!nu || !kappa))
    fail(ErrorKind::config_error, "a power-law problem needs both --nu and --kappa");
  if (src == Source::features && (!features || !samples))
    fail(ErrorKind::config_error, "a random-feature problem needs both --features and --samples");
  if (convention != "differenced" && convention != "pointwise")
    fail(ErrorKind::config_error, "convention must be differenced or pointwise");
  if (!(beta > -1.0 && beta < 1.0))
    fail(ErrorKind::invalid_spec, "beta = " + std::to_string(beta) + " outside (-1, 1)");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::invalid_spec, "alpha must be positive");
  if (batch < 1) fail(ErrorKind::invalid_batch, "batch size must be at least 1");
  if (dataset_size && batch > *dataset_size)
    fail(ErrorKind::invalid_batch, "batch exceeds dataset size");
  if (!std::isfinite(tau1) || !std::isfinite(tau2)) fail(ErrorKind::invalid_spec, "tau must be finite");
  if (modes < 2) fail(ErrorKind::invalid_spec, "need at least 2 modes");
  if (runs < 2) fail(ErrorKind::invalid_spec, "Monte Carlo needs at least 2 runs");
  if (torus && *torus < 1) fail(ErrorKind::invalid_spec, "torus size must be positive");
  if (!(torus_length > 0.0)) fail(ErrorKind::invalid_spec, "torus length must be positive");
  for (const auto& r : regimes)
    if (r != "se" && r != "noiseless" && r != "full" && r != "mc")
      fail(ErrorKind::config_error, "unknown regime '" + r + "'");
  for (std::size_t b : b_list)
    (void)sgdphase::gamma_for_batch(effective_dataset_size(), b);
  if (grid_alpha && grid_alpha->lo <= 0.0)
    fail(ErrorKind::invalid_spec, "alpha grid must be positive");
  if (grid_beta && (grid_beta->lo <= -1.0 || grid_beta->hi >= 1.0))
    fail(ErrorKind::invalid_spec, "beta grid must lie in (-1, 1)");
  if (grid_nu && grid_nu->lo <= 0.0) fail(ErrorKind::invalid_spec, "nu grid must be positive");
  if (grid_zeta && grid_zeta->lo <= 0.0) fail(ErrorKind::invalid_spec, "zeta grid must be positive");
  if (effective_dataset_size()) (void)gamma();
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["source"] = sgdcli::to_string(source());
  if (nu) j["nu"] = *nu;
  if (kappa) j["kappa"] = *kappa;
  if (source() == Source::power_law) {
    j["Lambda"] = Lambda;
    j["K"] = K;
    j["modes"] = modes;
    j["convention"] = convention;
  }
  if (!csv.empty()) j["csv"] = csv;
  if (torus) {
    j["torus"] = *torus;
    j["torus_length"] = torus_length;
  }
  if (features) j["features"] = *features;
  if (samples) j["samples"] = *samples;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["batch"] = batch;
  if (dataset_size) j["dataset_size"] = *dataset_size;
  j["gamma"] = gamma();
  j["tau1"] = tau1;
  j["tau2"] = tau2;
  j["steps"] = steps;
  j["runs"] = runs;
  j["seed"] = seed;
  if (!regimes.empty()) j["regimes"] = regimes;
  if (grid_alpha) j["grid_alpha"] = grid_alpha->to_string();
  if (grid_beta) j["grid_beta"] = grid_beta->to_string();
  if (grid_nu) j["grid_nu"] = grid_nu->to_string();
  if (grid_zeta) j["grid_zeta"] = grid_zeta->to_string();
  if (!b_list.empty()) j["b_list"] = b_list;
  j["out"] = out;
  j["plot"] = plot;
  if (!config_file.empty()) j["config"] = config_file;
  return j;
}

std::optional<ExperimentConfig> parse_config(const std::vector<std::string>& args) {
  ExperimentConfig c;
  CLI::App app{"Mini-batch SGD with momentum on quadratic problems: simulation and "
               "generating-function analysis",
               "sgdphaselab"};
  app.set_config("--config", "", "Flat key = value file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::string grid_alpha, grid_beta, grid_nu, grid_zeta;
  app.add_option("command", c.command, "simulate | stability-map | asymptotics | divergence | "
                                       "phase-diagram | fit | se-error")
      ->required();
  app.add_option("--nu", c.nu, "Eigenvalue decay exponent");
  app.add_option("--kappa", c.kappa, "Target decay exponent");
  app.add_option("--Lambda", c.Lambda, "Eigenvalue scale");
  app.add_option("--K", c.K, "Target scale");
  auto* modes = app.add_option("--modes", c.modes, "Number of modes M");
  app.add_option("--convention", c.convention, "differenced | pointwise");
  app.add_option("--csv", c.csv, "Spectrum CSV (k,lambda,lambda_c)");
  app.add_option("--torus", c.torus, "1-D torus size N");
  app.add_option("--torus-length", c.torus_length, "Torus kernel length scale");
  app.add_option("--features", c.features, "Random-feature dimension d");
  app.add_option("--samples", c.samples, "Random-feature sample count N");
  app.add_option("--alpha", c.alpha, "Learning rate");
  app.add_option("--beta", c.beta, "Momentum");
  app.add_option("--batch", c.batch, "Batch size b");
  app.add_option("--dataset-size", c.dataset_size, "Dataset size N for gamma");
  app.add_option("--tau1", c.tau1, "SE coefficient tau1");
  app.add_option("--tau2", c.tau2, "SE coefficient tau2 (tau in the analysis)");
  auto* steps = app.add_option("--steps", c.steps, "Number of steps T");
  app.add_option("--runs", c.runs, "Monte Carlo runs");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--regimes", c.regimes, "Comma list of se, noiseless, full, mc")->delimiter(',');
  app.add_option("--grid-alpha", grid_alpha, "lo:hi:n");
  app.add_option("--grid-beta", grid_beta, "lo:hi:n");
  app.add_option("--grid-nu", grid_nu, "lo:hi:n");
  app.add_option("--grid-zeta", grid_zeta, "lo:hi:n");
  app.add_option("--b-list", c.b_list, "Comma list of batch sizes")->delimiter(',');
  app.add_option("--out", c.out, "Output directory");
  app.add_flag("--plot", c.plot, "Also write SVG plots");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    fail(ErrorKind::config_error, e.what());
  }
  if (auto* cfg = app.get_config_ptr(); cfg && cfg->count() > 0) c.config_file = cfg->as<std::string>();
  if (!grid_alpha.empty()) c.grid_alpha = parse_grid(grid_alpha);
  if (!grid_beta.empty()) c.grid_beta = parse_grid(grid_beta);
  if (!grid_nu.empty()) c.grid_nu = parse_grid(grid_nu);
  if (!grid_zeta.empty()) c.grid_zeta = parse_grid(grid_zeta);

  // Reduced-scale preset for the stability map.
  if (c.command == "stability-map") {
    if (modes->count() == 0) c.modes = 200;
    if (steps->count() == 0) c.steps = 1000;
    if (!c.grid_alpha) c.grid_alpha = Grid{0.1, 4.0, 40};
    if (!c.grid_beta) c.grid_beta = Grid{0.0, 0.95, 20};
  }
  if (c.command == "phase-diagram") {
    if (modes->count() == 0) c.modes = 2000;
    if (!c.grid_nu) c.grid_nu = Grid{0.25, 3.0, 12};
    if (!c.grid_zeta) c.grid_zeta = Grid{0.25, 3.0, 12};
  }
  if (c.command == "simulate" && c.regimes.empty()) c.regimes = {"se", "noiseless"};
  c.validate();
  return c;
}

}  // namespace sgdcli
