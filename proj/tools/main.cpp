#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homsim/commands.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out;
  int jobs = -1;
  bool oracle = false;
  long long seed = -1;
  std::vector<std::string> overrides;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file")->required();
  cmd->add_option("--out", flags.out, "output path (overrides config 'out')");
  cmd->add_option("--jobs", flags.jobs, "parallel sweep workers (overrides config 'jobs')");
  cmd->add_flag("--oracle", flags.oracle, "cross-check statistics against the Fock oracle");
  cmd->add_option("--seed", flags.seed, "random seed (overrides config 'seed')");
  cmd->add_option("--set", flags.overrides, "override any config key, e.g. --set grid.n=128");
}

homsim::ExperimentConfig load(const CommonFlags& flags) {
  homsim::ExperimentConfig config = homsim::parse_config_file(flags.config_path);
  for (const std::string& assignment : flags.overrides)
    homsim::apply_override(config, assignment);
  // Explicit flags win over both the file and --set.
  if (!flags.out.empty()) config.out = flags.out;
  if (flags.jobs >= 0) config.jobs = flags.jobs;
  if (flags.oracle) config.oracle = true;
  if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon interference in a two-channel quantum memory cell"};
  app.require_subcommand(1);

  CommonFlags spectrum_flags, hom_flags, dip_flags, sweep_flags;
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "Schmidt spectrum of a memory kernel (CSV + summary)");
  add_common_flags(spectrum, spectrum_flags);
  CLI::App* hom =
      app.add_subcommand("hom", "output photon statistics for two stored photons (JSON)");
  add_common_flags(hom, hom_flags);
  CLI::App* dip = app.add_subcommand("dip", "HOM dip: metrics vs write delay (CSV)");
  add_common_flags(dip, dip_flags);
  CLI::App* sweep =
      app.add_subcommand("sweep", "kernel parameter sweep: spectrum + HOM metrics (CSV)");
  add_common_flags(sweep, sweep_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum->parsed()) return homsim::run_spectrum(load(spectrum_flags), std::cerr);
    if (hom->parsed()) return homsim::run_hom(load(hom_flags), std::cerr);
    if (dip->parsed()) return homsim::run_dip(load(dip_flags), std::cerr);
    if (sweep->parsed()) return homsim::run_sweep(load(sweep_flags), std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error (invalid config): " << e.what() << '\n';
    return homsim::exit_invalid_config;
  }
  return homsim::exit_invalid_config;
}
