#include "homsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "homsim/errors.hpp"
#include "homsim/format.hpp"
#include "homsim/interference.hpp"
#include "homsim/parallel.hpp"
#include "homsim/schmidt.hpp"

namespace homsim {

namespace {

using json = nlohmann::ordered_json;

// splitmix64: tiny deterministic generator so randomised oracle runs are
// reproducible across platforms regardless of <random> internals.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Everything a command needs after interpreting the config.
struct Experiment {
  MemoryKernel kernel;
  SchmidtDecomposition decomposition;
};

MemoryKernel build_kernel(const ExperimentConfig& config, std::ostream& log) {
  if (config.kernel.kind == KernelKind::external) {
    if (config.kernel.file.empty())
      throw invalid_parameter("external kernel requires kernel.file");
    MemoryKernel kernel = load_kernel(config.kernel.file);
    const DimensionlessParams params = config.resolve_dimensionless();
    if (std::abs(params.T_W - kernel.grid().window()) > 1e-9 * params.T_W)
      throw invalid_parameter("config T_W disagrees with kernel file window");
    return kernel;
  }

  const DimensionlessParams params = config.resolve_dimensionless();
  if (config.units &&
      !config.units->fast_protocol_ok(config.fast_protocol_threshold)) {
    log << "warning: gamma * T_W = "
        << config.units->relaxation_rate * config.units->write_time
        << " is not << 1; outside the fast-protocol regime\n";
  }
  const TimeGrid grid = make_grid(config.grid_n, params.T_W, config.grid_rule);
  switch (config.kernel.kind) {
    case KernelKind::ideal:
      return kernel_ideal(grid);
    case KernelKind::gaussian_toy:
      return kernel_gaussian_toy(grid, config.kernel.sigma, config.kernel.mu1);
    case KernelKind::fast_memory:
      return kernel_fast_memory(grid, params.L, config.kernel.nz);
    case KernelKind::external:
      break;
  }
  throw invalid_parameter("unsupported kernel kind");
}

Experiment build_experiment(const ExperimentConfig& config, std::ostream& log) {
  MemoryKernel kernel = build_kernel(config, log);
  SchmidtDecomposition dec = decompose(kernel, config.retention_cutoff);
  return Experiment{std::move(kernel), std::move(dec)};
}

std::vector<std::complex<double>> load_sampled_envelope(const std::filesystem::path& path,
                                                        const TimeGrid& grid) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open envelope file '" + path.string() + "'");
  std::vector<std::complex<double>> samples;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream row(line);
    double t = 0.0, re = 0.0, im = 0.0;
    if (!(row >> t >> re)) continue;  // blank line
    row >> im;
    const std::size_t k = samples.size();
    if (k >= grid.size())
      throw io_error("envelope file '" + path.string() + "' has more rows than grid points");
    if (std::abs(t - grid.node(k)) > 1e-9 * grid.window())
      throw io_error("envelope file '" + path.string() + "' row " + std::to_string(k + 1) +
                     " node does not match the grid");
    samples.emplace_back(re, im);
  }
  if (samples.size() != grid.size())
    throw io_error("envelope file '" + path.string() + "' has " +
                   std::to_string(samples.size()) + " rows, grid needs " +
                   std::to_string(grid.size()));
  return samples;
}

TemporalEnvelope build_envelope(const EnvelopeSpec& spec, const SchmidtDecomposition& dec) {
  const TimeGrid& grid = dec.grid();
  switch (spec.shape) {
    case EnvelopeSpec::Shape::gaussian:
      return TemporalEnvelope::gaussian(grid, spec.center, spec.width, spec.support_min,
                                        spec.support_max);
    case EnvelopeSpec::Shape::schmidt_mode:
      if (spec.mode_index > dec.retained())
        throw invalid_parameter("envelope schmidt-mode index exceeds retained mode count");
      return TemporalEnvelope::from_samples(grid, dec.mode(spec.mode_index - 1));
    case EnvelopeSpec::Shape::sampled_file:
      return TemporalEnvelope::from_samples(grid, load_sampled_envelope(spec.file, grid));
  }
  throw invalid_parameter("unsupported envelope shape");
}

// Analytic shape of a gaussian envelope spec, for exact delayed evaluation.
std::function<std::complex<double>(double)> envelope_sampler(const EnvelopeSpec& spec) {
  if (spec.shape != EnvelopeSpec::Shape::gaussian) return {};
  return [spec](double t) -> std::complex<double> {
    if ((spec.support_min && t < *spec.support_min) ||
        (spec.support_max && t > *spec.support_max))
      return 0.0;
    const double d = t - spec.center;
    return std::exp(-d * d / (4.0 * spec.width * spec.width));
  };
}

std::size_t effective_cutoff(const ExperimentConfig& config,
                             const SchmidtDecomposition& dec) {
  if (config.mode_cutoff == 0) return dec.retained();
  if (config.mode_cutoff > dec.retained())
    throw invalid_parameter("mode_cutoff exceeds retained mode count");
  return config.mode_cutoff;
}

std::filesystem::path require_out(const ExperimentConfig& config) {
  if (config.out.empty()) throw invalid_parameter("no output path: set 'out' or pass --out");
  return config.out;
}

// Atomic-ish artifact write: everything goes to <out>.partial first and is
// renamed once complete, so an interrupted run never leaves a clean-looking
// truncated file.
void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path partial = path.string() + ".partial";
  {
    std::ofstream out(partial, std::ios::binary);
    if (!out) throw io_error("cannot open '" + partial.string() + "' for writing");
    out << content;
    if (!out) throw io_error("write to '" + partial.string() + "' failed");
  }
  std::filesystem::rename(partial, path);
}

std::filesystem::path summary_path(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  p.replace_extension(".summary.json");
  return p;
}

json statistics_json(const OutputStatistics& stats, const HomMetrics& metrics) {
  json j;
  j["p00"] = stats.p00;
  j["p10"] = stats.p10;
  j["p01"] = stats.p01;
  j["p20"] = stats.p20;
  j["p11"] = stats.p11;
  j["p02"] = stats.p02;
  json re = json::array(), im = json::array();
  for (const auto& z : stats.rho2) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  j["rho2"]["re"] = re;
  j["rho2"]["im"] = im;
  json m;
  m["coincidence"] = metrics.coincidence;
  if (metrics.bunching_conditional) m["bunching_conditional"] = *metrics.bunching_conditional;
  if (metrics.noon_fidelity) m["noon_fidelity"] = *metrics.noon_fidelity;
  m["total_efficiency"] = metrics.total_efficiency;
  j["metrics"] = m;
  j["modes_used"] = stats.modes_used;
  j["truncation"] = {{"envelope_1", stats.truncation_1},
                     {"envelope_2", stats.truncation_2}};
  return j;
}

std::string csv_opt(const std::optional<double>& v) {
  return v ? format_g17(*v) : std::string();
}

int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const unphysical_kernel& e) {
    log << "error (unphysical kernel): " << e.what() << '\n';
    return exit_unphysical_kernel;
  } catch (const nonsymmetric_kernel& e) {
    log << "error (unphysical kernel): " << e.what() << '\n';
    return exit_unphysical_kernel;
  } catch (const std::exception& e) {
    log << "error (invalid config): " << e.what() << '\n';
    return exit_invalid_config;
  }
}

}  // namespace

int run_spectrum(const ExperimentConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const std::filesystem::path out = require_out(config);
    Experiment ex = build_experiment(config, log);

    std::ostringstream csv;
    csv << "index,lambda,sqrt_lambda\n";
    for (std::size_t i = 0; i < ex.decomposition.retained(); ++i)
      csv << (i + 1) << ',' << format_g17(ex.decomposition.lambda(i)) << ','
          << format_g17(std::sqrt(ex.decomposition.lambda(i))) << '\n';
    write_file_atomically(out, csv.str());

    json summary;
    summary["kernel"] = to_string(ex.kernel.kind());
    summary["grid"] = {{"n", ex.kernel.grid().size()},
                       {"rule", to_string(ex.kernel.grid().rule())},
                       {"T_W", ex.kernel.grid().window()}};
    summary["retained"] = ex.decomposition.retained();
    summary["lambda_1"] = ex.decomposition.lambda(0);
    if (ex.decomposition.retained() > 1) summary["lambda_2"] = ex.decomposition.lambda(1);
    summary["schmidt_number"] = schmidt_number(ex.decomposition);
    write_file_atomically(summary_path(out), summary.dump(2) + "\n");
    return exit_ok;
  });
}

int run_hom(const ExperimentConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const std::filesystem::path out = require_out(config);
    if (!config.envelope1 || !config.envelope2)
      throw invalid_parameter("hom requires envelope1.* and envelope2.*");
    Experiment ex = build_experiment(config, log);
    const std::size_t cutoff = effective_cutoff(config, ex.decomposition);

    TwoPhotonInput input(ex.decomposition, build_envelope(*config.envelope1, ex.decomposition),
                         build_envelope(*config.envelope2, ex.decomposition));
    StatisticsOptions opts;
    opts.truncation_bound = config.truncation_bound;
    const OutputStatistics stats = analytic_statistics(input, cutoff, opts);
    const HomMetrics metrics = hom_metrics(stats);
    json j = statistics_json(stats, metrics);

    bool oracle_failed = false;
    if (config.oracle) {
      if (cutoff > 6)
        throw invalid_parameter("--oracle requires mode_cutoff <= 6 (Fock space size)");
      double worst = max_deviation(stats, fock_oracle(input, cutoff, opts));

      // Optional randomised envelope pairs against the same decomposition.
      SplitMix64 rng(config.seed);
      for (int inst = 0; inst < config.oracle_instances; ++inst) {
        const std::size_t n = ex.decomposition.grid().size();
        auto random_envelope = [&] {
          std::vector<std::complex<double>> mix(n, 0.0);
          for (std::size_t i = 0; i < cutoff; ++i) {
            const std::complex<double> amp(rng.uniform() - 0.5, rng.uniform() - 0.5);
            for (std::size_t k = 0; k < n; ++k)
              mix[k] += amp * ex.decomposition.mode(i)[k];
          }
          return TemporalEnvelope::from_samples(ex.decomposition.grid(), std::move(mix));
        };
        TwoPhotonInput random_input(ex.decomposition, random_envelope(), random_envelope());
        const OutputStatistics lhs = analytic_statistics(random_input, cutoff, opts);
        const OutputStatistics rhs = fock_oracle(random_input, cutoff, opts);
        worst = std::max(worst, max_deviation(lhs, rhs));
      }
      j["oracle"] = {{"max_deviation", worst},
                     {"tolerance", config.oracle_tolerance},
                     {"instances", config.oracle_instances + 1}};
      if (worst > config.oracle_tolerance) {
        log << "oracle disagreement: max deviation " << worst << " exceeds tolerance "
            << config.oracle_tolerance << '\n';
        oracle_failed = true;
      }
    }

    write_file_atomically(out, j.dump(2) + "\n");
    return oracle_failed ? exit_oracle_disagreement : exit_ok;
  });
}

int run_dip(const ExperimentConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const std::filesystem::path out = require_out(config);
    if (config.sweep.parameter != "delay")
      throw invalid_parameter("dip requires sweep.parameter = delay");
    if (!config.envelope1)
      throw invalid_parameter("dip requires envelope1.* as the base envelope");
    Experiment ex = build_experiment(config, log);
    const std::size_t cutoff = effective_cutoff(config, ex.decomposition);
    const TemporalEnvelope base = build_envelope(*config.envelope1, ex.decomposition);

    set_thread_count(config.jobs);
    DelaySweepOptions opts;
    opts.sampler = envelope_sampler(*config.envelope1);
    opts.statistics.truncation_bound = config.truncation_bound;
    const std::vector<DelayPoint> points =
        delay_sweep(ex.decomposition, base, config.sweep.values, cutoff, opts);

    std::ostringstream csv;
    csv << "delay,truncated_weight,p00,p10,p01,p20,p11,p02,"
           "coincidence,bunching_conditional,noon_fidelity,total_efficiency\n";
    for (const DelayPoint& pt : points) {
      csv << format_g17(pt.delay) << ',' << format_g17(pt.truncated_weight) << ','
          << format_g17(pt.statistics.p00) << ',' << format_g17(pt.statistics.p10) << ','
          << format_g17(pt.statistics.p01) << ',' << format_g17(pt.statistics.p20) << ','
          << format_g17(pt.statistics.p11) << ',' << format_g17(pt.statistics.p02) << ','
          << format_g17(pt.metrics.coincidence) << ','
          << csv_opt(pt.metrics.bunching_conditional) << ','
          << csv_opt(pt.metrics.noon_fidelity) << ','
          << format_g17(pt.metrics.total_efficiency) << '\n';
    }
    write_file_atomically(out, csv.str());
    return exit_ok;
  });
}

int run_sweep(const ExperimentConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const std::filesystem::path out = require_out(config);
    const std::string& parameter = config.sweep.parameter;
    if (parameter != "L" && parameter != "sigma" && parameter != "mu1")
      throw invalid_parameter("sweep.parameter must be one of L, sigma, mu1");
    if (parameter == "L" && config.kernel.kind != KernelKind::fast_memory)
      throw invalid_parameter("sweeping L requires kernel.kind = fast-memory");
    if ((parameter == "sigma" || parameter == "mu1") &&
        config.kernel.kind != KernelKind::gaussian_toy)
      throw invalid_parameter("sweeping " + parameter +
                              " requires kernel.kind = gaussian-toy");

    struct Row {
      double value = 0.0;
      bool ok = false;
      std::string failure;
      double lambda1 = 0.0, lambda2 = 0.0, schmidt = 0.0;
      std::optional<double> efficiency, noon;
    };
    const std::int64_t count = static_cast<std::int64_t>(config.sweep.values.size());
    std::vector<Row> rows(config.sweep.values.size());

    set_thread_count(config.jobs);
    std::ostringstream silent;  // per-point warnings would interleave across threads
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t idx = 0; idx < count; ++idx) {
      Row& row = rows[idx];
      row.value = config.sweep.values[idx];
      try {
        ExperimentConfig point = config;
        if (parameter == "L") {
          if (!point.dimensionless) point.dimensionless = point.resolve_dimensionless();
          point.units.reset();
          point.dimensionless->L = row.value;
        } else if (parameter == "sigma") {
          point.kernel.sigma = row.value;
        } else {
          point.kernel.mu1 = row.value;
        }
        Experiment ex = build_experiment(point, silent);
        row.lambda1 = ex.decomposition.lambda(0);
        row.lambda2 = ex.decomposition.retained() > 1 ? ex.decomposition.lambda(1) : 0.0;
        row.schmidt = schmidt_number(ex.decomposition);
        if (point.envelope1 && point.envelope2) {
          // The retained count varies across sweep points; modes dropped by
          // the retention floor carry no weight, so the cutoff clamps rather
          // than failing the point.
          point.mode_cutoff = std::min(point.mode_cutoff, ex.decomposition.retained());
          const std::size_t cutoff = effective_cutoff(point, ex.decomposition);
          StatisticsOptions opts;
          opts.truncation_bound = point.truncation_bound;
          TwoPhotonInput input(ex.decomposition,
                               build_envelope(*point.envelope1, ex.decomposition),
                               build_envelope(*point.envelope2, ex.decomposition));
          const HomMetrics metrics = hom_metrics(analytic_statistics(input, cutoff, opts));
          row.efficiency = metrics.total_efficiency;
          row.noon = metrics.noon_fidelity;
        }
        row.ok = true;
      } catch (const std::exception& e) {
        row.failure = e.what();
      }
    }

    std::ostringstream csv;
    csv << parameter << ",status,lambda1,lambda2,schmidt_number,total_efficiency,noon_fidelity\n";
    bool any_failed = false;
    for (const Row& row : rows) {
      if (row.ok) {
        csv << format_g17(row.value) << ",ok," << format_g17(row.lambda1) << ','
            << format_g17(row.lambda2) << ',' << format_g17(row.schmidt) << ','
            << csv_opt(row.efficiency) << ',' << csv_opt(row.noon) << '\n';
      } else {
        any_failed = true;
        csv << format_g17(row.value) << ",failed,,,,,\n";
        log << "sweep point " << format_g17(row.value) << " failed: " << row.failure << '\n';
      }
    }
    write_file_atomically(out, csv.str());
    return any_failed ? exit_partial_failure : exit_ok;
  });
}

}  // namespace homsim
