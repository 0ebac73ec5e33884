#include "homsim/schmidt.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include "homsim/errors.hpp"
#include "homsim/format.hpp"

namespace homsim {

TemporalEnvelope::TemporalEnvelope(TimeGrid grid, std::vector<std::complex<double>> samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {}

TemporalEnvelope TemporalEnvelope::from_samples(const TimeGrid& grid,
                                                std::vector<std::complex<double>> samples) {
  if (samples.size() != grid.size())
    throw invalid_parameter("envelope sample count does not match grid");
  double norm2 = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k)
    norm2 += grid.weight(k) * std::norm(samples[k]);
  if (!(norm2 > 1e-300))
    throw invalid_parameter("envelope is numerically zero, cannot normalise");
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& s : samples) s *= inv;
  return TemporalEnvelope(grid, std::move(samples));
}

TemporalEnvelope TemporalEnvelope::from_samples(const TimeGrid& grid,
                                                std::span<const double> samples) {
  std::vector<std::complex<double>> c(samples.begin(), samples.end());
  return from_samples(grid, std::move(c));
}

TemporalEnvelope TemporalEnvelope::gaussian(const TimeGrid& grid, double center, double width,
                                            std::optional<double> support_min,
                                            std::optional<double> support_max) {
  if (!(width > 0.0)) throw invalid_parameter("gaussian envelope: width must be positive");
  std::vector<std::complex<double>> samples(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.node(k);
    if ((support_min && t < *support_min) || (support_max && t > *support_max)) {
      samples[k] = 0.0;
      continue;
    }
    const double d = t - center;
    samples[k] = std::exp(-d * d / (4.0 * width * width));
  }
  return from_samples(grid, std::move(samples));
}

std::complex<double> TemporalEnvelope::overlap(const TemporalEnvelope& other) const {
  if (!(grid_ == other.grid_)) throw invalid_parameter("envelope overlap: grid mismatch");
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < samples_.size(); ++k)
    acc += grid_.weight(k) * std::conj(samples_[k]) * other.samples_[k];
  return acc;
}

SchmidtDecomposition::SchmidtDecomposition(TimeGrid grid, std::vector<double> lambdas,
                                           Matrix modes)
    : grid_(std::move(grid)), lambdas_(std::move(lambdas)), modes_(std::move(modes)) {
  if (modes_.rows() != lambdas_.size() || modes_.cols() != grid_.size())
    throw invalid_parameter("decomposition mode matrix has wrong shape");
  for (std::size_t i = 0; i + 1 < lambdas_.size(); ++i)
    if (lambdas_[i] < lambdas_[i + 1])
      throw invalid_parameter("eigenvalues must be sorted descending");
  if (!lambdas_.empty() && (lambdas_.front() > 1.0 + 1e-9 || lambdas_.back() < 0.0))
    throw unphysical_kernel("eigenvalues outside [0, 1 + 1e-9]");
}

SchmidtDecomposition decompose(const MemoryKernel& kernel, double cutoff) {
  if (!(cutoff >= 0.0) || cutoff >= 1.0)
    throw invalid_parameter("decompose: cutoff must lie in [0, 1)");
  const TimeGrid& grid = kernel.grid();
  const std::size_t n = grid.size();

  Matrix s(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      s(k, l) = std::sqrt(grid.weight(k)) * kernel(k, l) * std::sqrt(grid.weight(l));
  EigenSystem eig = jacobi_eigensym(std::move(s));

  const double mu1 = eig.values.front();
  if (!(mu1 > 0.0)) throw unphysical_kernel("kernel has no positive Schmidt weight");
  if (mu1 * mu1 > 1.0 + 1e-9)
    throw unphysical_kernel("lambda_1 = " + std::to_string(mu1 * mu1) + " exceeds 1 + 1e-9");

  std::vector<double> mu = eig.values;
  for (auto& m : mu) {
    if (m < 0.0) {
      if (-m > 1e-9 * mu1)
        throw unphysical_kernel("negative Schmidt eigenvalue " + std::to_string(m) +
                                " beyond quadrature rounding");
      m = 0.0;
    }
  }

  std::size_t retained = 0;
  const double floor = cutoff * mu1 * mu1;
  while (retained < n && mu[retained] * mu[retained] >= floor && mu[retained] > 0.0) ++retained;
  if (cutoff == 0.0) retained = n;

  std::vector<double> lambdas(retained);
  Matrix modes(retained, n);
  for (std::size_t i = 0; i < retained; ++i) {
    lambdas[i] = mu[i] * mu[i];
    double max_abs_entry = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      modes(i, k) = eig.vectors(k, i) / std::sqrt(grid.weight(k));
      max_abs_entry = std::max(max_abs_entry, std::abs(modes(i, k)));
    }
    // Sign convention: first component above noise is positive.
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(modes(i, k)) > 1e-8 * max_abs_entry) {
        if (modes(i, k) < 0.0)
          for (std::size_t k2 = 0; k2 < n; ++k2) modes(i, k2) = -modes(i, k2);
        break;
      }
    }
  }
  return SchmidtDecomposition(grid, std::move(lambdas), std::move(modes));
}

namespace {

void reconstruct_row_range(const SchmidtDecomposition& dec, Matrix& g, std::size_t k) {
  const std::size_t n = dec.grid().size();
  for (std::size_t l = k; l < n; ++l) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dec.retained(); ++i)
      acc += std::sqrt(dec.lambda(i)) * dec.mode(i)[k] * dec.mode(i)[l];
    g(k, l) = acc;
    g(l, k) = acc;
  }
}

}  // namespace

MemoryKernel reconstruct(const SchmidtDecomposition& dec, Execution exec) {
  const std::size_t n = dec.grid().size();
  Matrix g(n, n);
  if (exec == Execution::serial) {
    for (std::size_t k = 0; k < n; ++k) reconstruct_row_range(dec, g, k);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < n; ++k) reconstruct_row_range(dec, g, k);
  }
  return MemoryKernel(dec.grid(), std::move(g), KernelKind::external);
}

ModeAmplitudes project(const TemporalEnvelope& envelope, const SchmidtDecomposition& dec,
                       std::size_t max_modes) {
  if (!(envelope.grid() == dec.grid()))
    throw invalid_parameter("project: envelope and decomposition grids differ");
  const std::size_t n = dec.grid().size();
  const std::size_t count = std::min(max_modes, dec.retained());
  ModeAmplitudes out;
  out.coefficients.resize(count);
  double weight = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    std::complex<double> c = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      c += dec.grid().weight(k) * dec.mode(i)[k] * envelope[k];
    out.coefficients[i] = c;
    weight += std::norm(c);
  }
  double r2 = 1.0 - weight;
  if (r2 < 0.0) {
    if (r2 < -1e-12)
      throw std::logic_error("projection weight exceeds 1: modes are not orthonormal");
    r2 = 0.0;
  }
  out.residual_norm = std::sqrt(r2);
  return out;
}

double schmidt_number(const SchmidtDecomposition& dec) {
  double sum = 0.0, sum2 = 0.0;
  for (double l : dec.lambdas()) {
    sum += l;
    sum2 += l * l;
  }
  if (!(sum2 > 0.0)) throw degenerate_kernel("schmidt_number: all eigenvalues are zero");
  return sum * sum / sum2;
}

void write_spectrum_csv(const std::filesystem::path& path, const SchmidtDecomposition& dec) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  out << "index,lambda,sqrt_lambda\n";
  for (std::size_t i = 0; i < dec.retained(); ++i)
    out << (i + 1) << ',' << format_g17(dec.lambda(i)) << ',' << format_g17(std::sqrt(dec.lambda(i)))
        << '\n';
  if (!out) throw io_error("write to '" + path.string() + "' failed");
}

void write_modes_csv(const std::filesystem::path& path, const SchmidtDecomposition& dec,
                     std::size_t max_modes) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  const std::size_t count = std::min(max_modes, dec.retained());
  out << "node,weight";
  for (std::size_t i = 0; i < count; ++i) out << ",psi_" << (i + 1);
  out << '\n';
  for (std::size_t k = 0; k < dec.grid().size(); ++k) {
    out << format_g17(dec.grid().node(k)) << ',' << format_g17(dec.grid().weight(k));
    for (std::size_t i = 0; i < count; ++i) out << ',' << format_g17(dec.mode(i)[k]);
    out << '\n';
  }
  if (!out) throw io_error("write to '" + path.string() + "' failed");
}

}  // namespace homsim
