#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "homsim/kernel.hpp"

namespace homsim {

// Single-photon wave-packet shape on a grid, normalised under the quadrature
// inner product: sum_k w_k |f(t_k)|^2 = 1.
class TemporalEnvelope {
 public:
  static TemporalEnvelope from_samples(const TimeGrid& grid,
                                       std::vector<std::complex<double>> samples);
  static TemporalEnvelope from_samples(const TimeGrid& grid, std::span<const double> samples);

  // exp(-(t-center)^2 / (4 width^2)), optionally hard-windowed to
  // [support_min, support_max], then normalised. width is the intensity
  // standard deviation.
  static TemporalEnvelope gaussian(const TimeGrid& grid, double center, double width,
                                   std::optional<double> support_min = std::nullopt,
                                   std::optional<double> support_max = std::nullopt);

  const TimeGrid& grid() const { return grid_; }
  std::span<const std::complex<double>> samples() const { return samples_; }
  std::complex<double> operator[](std::size_t k) const { return samples_[k]; }

  std::complex<double> overlap(const TemporalEnvelope& other) const;  // <this|other>

 private:
  TemporalEnvelope(TimeGrid grid, std::vector<std::complex<double>> samples);

  TimeGrid grid_;
  std::vector<std::complex<double>> samples_;
};

// Schmidt coefficients of an envelope against the retained modes plus the
// weight r left outside them; sum |c_i|^2 + r^2 = 1.
struct ModeAmplitudes {
  std::vector<std::complex<double>> coefficients;
  double residual_norm = 0.0;
};

// Eigenvalues lambda_i (descending, in [0,1]) and mode functions psi_i of the
// kernel, orthonormal under the quadrature inner product. Mode i carries the
// per-mode storage-retrieval amplitude sqrt(lambda_i).
class SchmidtDecomposition {
 public:
  SchmidtDecomposition(TimeGrid grid, std::vector<double> lambdas, Matrix modes);

  const TimeGrid& grid() const { return grid_; }
  std::size_t retained() const { return lambdas_.size(); }
  double lambda(std::size_t i) const { return lambdas_[i]; }
  std::span<const double> lambdas() const { return lambdas_; }
  // psi_i sampled on the grid nodes.
  std::span<const double> mode(std::size_t i) const { return modes_.row(i); }

 private:
  TimeGrid grid_;
  std::vector<double> lambdas_;  // descending
  Matrix modes_;                 // retained x n, row i = psi_i(t_k)
};

// Quadrature-weighted symmetric eigenproblem (Nystrom method): eigenvalues mu
// of sqrt(w_k) G_kl sqrt(w_l) give lambda_i = mu_i^2 and psi_i = v_i / sqrt(w).
// Modes with lambda_i >= cutoff * lambda_1 are retained. Negative mu beyond
// 1e-9 * mu_1, or lambda_1 > 1 + 1e-9, reject the kernel as unphysical.
SchmidtDecomposition decompose(const MemoryKernel& kernel, double cutoff = 1e-12);

// G~_kl = sum_i sqrt(lambda_i) psi_i(t_k) psi_i(t_l), tagged external.
MemoryKernel reconstruct(const SchmidtDecomposition& dec,
                         Execution exec = Execution::parallel);

// c_i = sum_k w_k psi_i(t_k) f(t_k) over the first max_modes retained modes
// (all by default).
ModeAmplitudes project(const TemporalEnvelope& envelope, const SchmidtDecomposition& dec,
                       std::size_t max_modes = SIZE_MAX);

// Effective mode count (sum lambda)^2 / sum lambda^2.
double schmidt_number(const SchmidtDecomposition& dec);

// CSV exports: spectrum as "index,lambda,sqrt_lambda"; modes as
// "node,weight,psi_1..psi_K".
void write_spectrum_csv(const std::filesystem::path& path, const SchmidtDecomposition& dec);
void write_modes_csv(const std::filesystem::path& path, const SchmidtDecomposition& dec,
                     std::size_t max_modes = SIZE_MAX);

}  // namespace homsim
