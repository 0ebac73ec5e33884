#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homsim/core.hpp"
#include "homsim/kernel.hpp"

namespace homsim {

struct EnvelopeSpec {
  enum class Shape { gaussian, schmidt_mode, sampled_file };
  Shape shape = Shape::gaussian;
  double center = 0.0;
  double width = 0.0;
  std::optional<double> support_min;
  std::optional<double> support_max;
  std::size_t mode_index = 1;  // 1-based Schmidt mode
  std::filesystem::path file;
};

struct KernelSpec {
  KernelKind kind = KernelKind::ideal;
  double sigma = 0.0;  // gaussian-toy correlation time
  double mu1 = 1.0;    // gaussian-toy peak singular value
  int nz = 64;         // fast-memory spatial quadrature points
  std::filesystem::path file;  // external kernel matrix
};

struct SweepSpec {
  std::string parameter;  // "delay", "L", "sigma" or "mu1"
  std::vector<double> values;
};

// One experiment = one config file; command-line flags override single keys.
struct ExperimentConfig {
  KernelSpec kernel;
  int grid_n = 64;
  QuadratureRule grid_rule = QuadratureRule::gauss_legendre;

  std::optional<UnitsConfig> units;
  std::optional<DimensionlessParams> dimensionless;

  std::optional<EnvelopeSpec> envelope1;
  std::optional<EnvelopeSpec> envelope2;

  std::size_t mode_cutoff = 0;      // 0 = every retained mode
  double truncation_bound = 1e-6;
  double retention_cutoff = 1e-12;  // decomposition cutoff epsilon

  SweepSpec sweep;
  std::filesystem::path out;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = runtime default
  bool oracle = false;
  double oracle_tolerance = 1e-8;
  int oracle_instances = 0;  // extra randomised envelope pairs under --oracle
  double fast_protocol_threshold = 0.1;

  // Exactly one of units/dimensionless must be set; returns the dimensionless
  // parameters either way.
  DimensionlessParams resolve_dimensionless() const;
};

// Key/value text format: one "key = value" per line, '#' starts a comment.
// Unknown keys are rejected.
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Apply one "key=value" override (same keys as the file).
void apply_override(ExperimentConfig& config, const std::string& assignment);

}  // namespace homsim
