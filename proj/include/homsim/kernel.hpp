#pragma once

#include <filesystem>
#include <string>

#include "homsim/core.hpp"
#include "homsim/linalg.hpp"

namespace homsim {

enum class KernelKind { ideal, gaussian_toy, fast_memory, external };

std::string to_string(KernelKind kind);

// Real symmetric sampling of the effective input->output memory kernel on a
// TimeGrid. The readout time reversal (arguments T_W - t) is folded into the
// builders, so a stored kernel always maps input envelopes straight to output
// envelopes. Immutable after construction.
class MemoryKernel {
 public:
  // Relative symmetry tolerance on max|G_kl - G_lk|.
  static constexpr double kSymmetryTol = 1e-10;

  MemoryKernel(TimeGrid grid, Matrix matrix, KernelKind kind);

  const TimeGrid& grid() const { return grid_; }
  const Matrix& matrix() const { return matrix_; }
  KernelKind kind() const { return kind_; }
  double operator()(std::size_t k, std::size_t l) const { return matrix_(k, l); }

  // Quadrature application (G f)(t_k) = sum_l w_l G_kl f(t_l).
  std::vector<double> apply(std::span<const double> samples) const;

  double symmetry_residual() const;

 private:
  TimeGrid grid_;
  Matrix matrix_;
  KernelKind kind_;
};

// Discrete delta kernel G_kl = delta_kl / w_k: the ideal memory, identity
// under the grid's quadrature.
MemoryKernel kernel_ideal(const TimeGrid& grid);

// Test kernel with a tunable Schmidt spectrum:
//   G(t,t') = c * exp(-(t-t')^2/(2 sigma^2))
//               * exp(-((t-T/2)^2 + (t'-T/2)^2) / (2 (4 sigma)^2))
// built, decomposed, and rescaled so the largest Schmidt singular value
// sqrt(lambda_1) equals mu1.
MemoryKernel kernel_gaussian_toy(const TimeGrid& grid, double sigma, double mu1,
                                 Execution exec = Execution::parallel);

// Write-then-read kernel of the resonant fast-memory protocol,
//   K(t,t') = int_0^L dz W(z, T_W - t) W(z, T_W - t'),  W(z,t) = J0(2 sqrt(z t)),
// with the spatial integral on an nz-point Gauss-Legendre rule. The builder
// refuses kernels whose Schmidt spectrum exceeds 1 + 1e-9: the W formula is
// imported from the protocol literature and is never trusted blindly.
MemoryKernel kernel_fast_memory(const TimeGrid& grid, double L, int nz,
                                Execution exec = Execution::parallel);

// Pointwise K(t,t') of the fast-memory builder, for analytic spot checks.
double fast_memory_value(double L, double T_W, double t, double tp, int nz);

// Ingest an externally computed kernel. Symmetrised by averaging; the
// pre-symmetrisation residual is recorded and residuals above
// 1e-6 * max|G| are rejected.
struct ExternalKernel {
  MemoryKernel kernel;
  double asymmetry_residual;  // max|G_kl - G_lk| before averaging
};
ExternalKernel kernel_from_matrix(const TimeGrid& grid, Matrix matrix);

// Discretised commutator matrix of the vacuum amplitudes,
//   C_kl = delta_kl / w_k - sum_m w_m G_km G_ml,
// returned in quadrature-weighted form sqrt(w_k) C_kl sqrt(w_l); the memory
// is physical iff this matrix is positive semidefinite.
Matrix weighted_commutator_matrix(const MemoryKernel& kernel,
                                  Execution exec = Execution::parallel);

// Plain-text kernel exchange format: first line "n T_W rule", then n nodes,
// n weights, then n rows of n entries, all at 17 significant digits.
void save_kernel(const std::filesystem::path& path, const MemoryKernel& kernel);
MemoryKernel load_kernel(const std::filesystem::path& path);

}  // namespace homsim
