#pragma once

#include <iosfwd>

#include "homsim/config.hpp"

namespace homsim {

// Process exit codes shared by every subcommand.
enum ExitCode : int {
  exit_ok = 0,
  exit_invalid_config = 1,
  exit_unphysical_kernel = 2,
  exit_oracle_disagreement = 3,
  exit_partial_failure = 4,
};

// Each command writes its artifact(s) under config.out (via a .partial
// temporary renamed on success), reports diagnostics on `log`, and returns an
// ExitCode. Identical config + seed produce byte-identical outputs.
int run_spectrum(const ExperimentConfig& config, std::ostream& log);
int run_hom(const ExperimentConfig& config, std::ostream& log);
int run_dip(const ExperimentConfig& config, std::ostream& log);
int run_sweep(const ExperimentConfig& config, std::ostream& log);

}  // namespace homsim
