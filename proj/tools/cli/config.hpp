#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgdphase/simulate.hpp"
#include "sgdphase/spectrum.hpp"

namespace sgdcli {

// Evenly spaced values lo, ..., hi (n points, n >= 1), written `lo:hi:n`.
struct Grid {
  double lo = 0;
  double hi = 0;
  std::size_t n = 1;

  std::vector<double> values() const;
  std::string to_string() const;
};

Grid parse_grid(const std::string& text);

enum class Source { power_law, csv, torus, features };

const char* to_string(Source source);

struct ExperimentConfig {
  std::string command;

  // Problem source. Exactly one of: --nu/--kappa, --csv, --torus, --features.
  std::optional<double> nu, kappa;
  double Lambda = 1.0;
  double K = 1.0;
  std::size_t modes = 1000;
  std::string convention = "differenced";
  std::string csv;
  std::optional<std::size_t> torus;   // 1-D torus size N
  double torus_length = 0.5;          // kernel exp((cos(2 pi m / N) - 1) / l^2)
  std::optional<std::size_t> features;
  std::optional<std::size_t> samples;

  double alpha = 0.1;
  double beta = 0.0;
  std::size_t batch = 1;
  std::optional<std::size_t> dataset_size;
  double tau1 = 1.0;
  double tau2 = 1.0;
  std::size_t steps = 10000;
  std::size_t runs = 1000;
  std::uint64_t seed = 1;

  std::vector<std::string> regimes;
  std::optional<Grid> grid_alpha, grid_beta, grid_nu, grid_zeta;
  std::vector<std::size_t> b_list;

  std::string out = ".";
  bool plot = false;
  std::string config_file;

  Source source() const;
  sgdphase::C0Convention c0_convention() const;
  // Dataset size used for gamma: the explicit flag, else the sample count of
  // an explicit feature problem, else infinite.
  std::optional<std::size_t> effective_dataset_size() const;
  double gamma() const;
  sgdphase::SGDParams sgd_params() const;
  void validate() const;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& command_names();

// Parses `sgdphaselab <command> [flags]`. A `--config file` of flat
// `key = value` lines supplies defaults that flags override. Throws
// sgdphase::Error (config_error or invalid_spec) on bad input. Returns
// nullopt after printing help.
std::optional<ExperimentConfig> parse_config(const std::vector<std::string>& args);

}  // namespace sgdcli
