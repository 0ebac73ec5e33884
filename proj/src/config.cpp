#include "homsim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "homsim/errors.hpp"

namespace homsim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw invalid_parameter("config key '" + key + "': cannot parse number '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw invalid_parameter("config key '" + key + "': cannot parse integer '" + value + "'");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "ideal") return KernelKind::ideal;
  if (name == "gaussian-toy") return KernelKind::gaussian_toy;
  if (name == "fast-memory") return KernelKind::fast_memory;
  if (name == "external") return KernelKind::external;
  throw invalid_parameter("unknown kernel kind '" + name + "'");
}

EnvelopeSpec::Shape envelope_shape_from_string(const std::string& name) {
  if (name == "gaussian") return EnvelopeSpec::Shape::gaussian;
  if (name == "schmidt-mode") return EnvelopeSpec::Shape::schmidt_mode;
  if (name == "sampled-file") return EnvelopeSpec::Shape::sampled_file;
  throw invalid_parameter("unknown envelope shape '" + name + "'");
}

bool set_envelope_key(EnvelopeSpec& env, const std::string& key, const std::string& field,
                      const std::string& value) {
  if (field == "shape") {
    env.shape = envelope_shape_from_string(value);
  } else if (field == "center") {
    env.center = parse_double(key, value);
  } else if (field == "width") {
    env.width = parse_double(key, value);
  } else if (field == "support_min") {
    env.support_min = parse_double(key, value);
  } else if (field == "support_max") {
    env.support_max = parse_double(key, value);
  } else if (field == "index") {
    const long long v = parse_int(key, value);
    if (v < 1) throw invalid_parameter("config key '" + key + "': index must be >= 1");
    env.mode_index = static_cast<std::size_t>(v);
  } else if (field == "file") {
    env.file = value;
  } else {
    return false;
  }
  return true;
}

}  // namespace

DimensionlessParams ExperimentConfig::resolve_dimensionless() const {
  if (units.has_value() == dimensionless.has_value())
    throw invalid_parameter(
        "exactly one of the units.* and dimensionless.* blocks must be present");
  if (dimensionless) {
    dimensionless->validate();
    return *dimensionless;
  }
  return to_dimensionless(*units);
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw invalid_parameter("override '" + assignment + "' is not of the form key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) throw invalid_parameter("override with empty key");

  if (key == "kernel.kind") {
    config.kernel.kind = kernel_kind_from_string(value);
  } else if (key == "kernel.sigma") {
    config.kernel.sigma = parse_double(key, value);
  } else if (key == "kernel.mu1") {
    config.kernel.mu1 = parse_double(key, value);
  } else if (key == "kernel.nz") {
    config.kernel.nz = static_cast<int>(parse_int(key, value));
  } else if (key == "kernel.file") {
    config.kernel.file = value;
  } else if (key == "grid.n") {
    config.grid_n = static_cast<int>(parse_int(key, value));
  } else if (key == "grid.rule") {
    config.grid_rule = quadrature_rule_from_string(value);
  } else if (key == "units.rabi_frequency") {
    if (!config.units) config.units.emplace();
    config.units->rabi_frequency = parse_double(key, value);
  } else if (key == "units.coupling_constant") {
    if (!config.units) config.units.emplace();
    config.units->coupling_constant = parse_double(key, value);
  } else if (key == "units.linear_concentration") {
    if (!config.units) config.units.emplace();
    config.units->linear_concentration = parse_double(key, value);
  } else if (key == "units.cell_length") {
    if (!config.units) config.units.emplace();
    config.units->cell_length = parse_double(key, value);
  } else if (key == "units.write_time") {
    if (!config.units) config.units.emplace();
    config.units->write_time = parse_double(key, value);
  } else if (key == "units.relaxation_rate") {
    if (!config.units) config.units.emplace();
    config.units->relaxation_rate = parse_double(key, value);
  } else if (key == "dimensionless.T_W") {
    if (!config.dimensionless) config.dimensionless.emplace();
    config.dimensionless->T_W = parse_double(key, value);
  } else if (key == "dimensionless.L") {
    if (!config.dimensionless) config.dimensionless.emplace();
    config.dimensionless->L = parse_double(key, value);
  } else if (key.starts_with("envelope1.")) {
    if (!config.envelope1) config.envelope1.emplace();
    if (!set_envelope_key(*config.envelope1, key, key.substr(10), value))
      throw invalid_parameter("unknown config key '" + key + "'");
  } else if (key.starts_with("envelope2.")) {
    if (!config.envelope2) config.envelope2.emplace();
    if (!set_envelope_key(*config.envelope2, key, key.substr(10), value))
      throw invalid_parameter("unknown config key '" + key + "'");
  } else if (key == "mode_cutoff") {
    const long long v = parse_int(key, value);
    if (v < 0) throw invalid_parameter("mode_cutoff must be >= 0");
    config.mode_cutoff = static_cast<std::size_t>(v);
  } else if (key == "truncation_bound") {
    config.truncation_bound = parse_double(key, value);
  } else if (key == "cutoff") {
    config.retention_cutoff = parse_double(key, value);
  } else if (key == "sweep.parameter") {
    config.sweep.parameter = value;
  } else if (key == "sweep.values") {
    config.sweep.values = parse_list(key, value);
  } else if (key == "out") {
    config.out = value;
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "jobs") {
    config.jobs = static_cast<int>(parse_int(key, value));
  } else if (key == "oracle.tolerance") {
    config.oracle_tolerance = parse_double(key, value);
  } else if (key == "oracle.instances") {
    config.oracle_instances = static_cast<int>(parse_int(key, value));
  } else if (key == "fast_protocol_threshold") {
    config.fast_protocol_threshold = parse_double(key, value);
  } else {
    throw invalid_parameter("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path.string() + "'");
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_override(config, line);
    } catch (const invalid_parameter& e) {
      throw invalid_parameter(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

}  // namespace homsim
