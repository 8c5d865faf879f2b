#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/outputs.hpp"
#include "sgdphase/spectrum.hpp"

namespace sgdcli {

struct Problem {
  sgdphase::Spectrum spectrum;
  std::optional<sgdphase::FeatureProblem> features;  // torus and random-feature sources
  std::optional<sgdphase::PowerLawFit> exact_fit;    // generated power laws
};

Problem build_problem(const ExperimentConfig& config);

// Runs one command and records its files; the manifest is written last.
void run_command(const ExperimentConfig& config, OutputSet& out);

// Entry point: 0 on success, 2 on validation errors, 3 on numerical-domain
// errors, 1 on anything unexpected. Partial outputs are removed on failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace sgdcli
