#include "homsim/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "homsim/bessel.hpp"
#include "homsim/errors.hpp"
#include "homsim/format.hpp"

namespace homsim {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::ideal: return "ideal";
    case KernelKind::gaussian_toy: return "gaussian-toy";
    case KernelKind::fast_memory: return "fast-memory";
    case KernelKind::external: return "external";
  }
  return "unknown";
}

MemoryKernel::MemoryKernel(TimeGrid grid, Matrix matrix, KernelKind kind)
    : grid_(std::move(grid)), matrix_(std::move(matrix)), kind_(kind) {
  if (matrix_.rows() != grid_.size() || matrix_.cols() != grid_.size())
    throw invalid_parameter("kernel matrix dimensions do not match grid");
  const double scale = max_abs(matrix_);
  if (symmetry_residual() > kSymmetryTol * (scale > 0.0 ? scale : 1.0))
    throw nonsymmetric_kernel("kernel matrix violates G(t,t') = G(t',t)");
}

double MemoryKernel::symmetry_residual() const {
  double r = 0.0;
  for (std::size_t k = 0; k + 1 < matrix_.rows(); ++k)
    for (std::size_t l = k + 1; l < matrix_.cols(); ++l)
      r = std::max(r, std::abs(matrix_(k, l) - matrix_(l, k)));
  return r;
}

std::vector<double> MemoryKernel::apply(std::span<const double> samples) const {
  const std::size_t n = grid_.size();
  if (samples.size() != n) throw invalid_parameter("sample count does not match grid");
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t l = 0; l < n; ++l) acc += grid_.weight(l) * matrix_(k, l) * samples[l];
    out[k] = acc;
  }
  return out;
}

MemoryKernel kernel_ideal(const TimeGrid& grid) {
  const std::size_t n = grid.size();
  Matrix g(n, n, 0.0);
  for (std::size_t k = 0; k < n; ++k) g(k, k) = 1.0 / grid.weight(k);
  return MemoryKernel(grid, std::move(g), KernelKind::ideal);
}

namespace {

// Largest eigenvalue mu of sqrt(w_k) G_kl sqrt(w_l); mu = sqrt(lambda_1).
double largest_weighted_eigenvalue(const TimeGrid& grid, const Matrix& g) {
  const std::size_t n = grid.size();
  Matrix s(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      s(k, l) = std::sqrt(grid.weight(k)) * g(k, l) * std::sqrt(grid.weight(l));
  EigenSystem eig = jacobi_eigensym(std::move(s));
  return eig.values.front();
}

void fill_gaussian_toy_serial(const TimeGrid& grid, double sigma, Matrix& g) {
  const std::size_t n = grid.size();
  const double mid = 0.5 * grid.window();
  const double env = 2.0 * (4.0 * sigma) * (4.0 * sigma);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k; l < n; ++l) {
      const double t = grid.node(k), tp = grid.node(l);
      const double d = t - tp;
      const double v = std::exp(-d * d / (2.0 * sigma * sigma)) *
                       std::exp(-((t - mid) * (t - mid) + (tp - mid) * (tp - mid)) / env);
      g(k, l) = v;
      g(l, k) = v;
    }
}

void fill_gaussian_toy_parallel(const TimeGrid& grid, double sigma, Matrix& g) {
  const std::size_t n = grid.size();
  const double mid = 0.5 * grid.window();
  const double env = 2.0 * (4.0 * sigma) * (4.0 * sigma);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k; l < n; ++l) {
      const double t = grid.node(k), tp = grid.node(l);
      const double d = t - tp;
      const double v = std::exp(-d * d / (2.0 * sigma * sigma)) *
                       std::exp(-((t - mid) * (t - mid) + (tp - mid) * (tp - mid)) / env);
      g(k, l) = v;
      g(l, k) = v;
    }
}

}  // namespace

MemoryKernel kernel_gaussian_toy(const TimeGrid& grid, double sigma, double mu1,
                                 Execution exec) {
  if (!(sigma > 0.0)) throw invalid_parameter("gaussian-toy: sigma must be positive");
  if (!(mu1 > 0.0) || mu1 > 1.0)
    throw invalid_parameter("gaussian-toy: mu1 must lie in (0, 1]");
  const std::size_t n = grid.size();
  Matrix g(n, n);
  if (exec == Execution::serial)
    fill_gaussian_toy_serial(grid, sigma, g);
  else
    fill_gaussian_toy_parallel(grid, sigma, g);

  // Second pass: rescale so sqrt(lambda_1) hits mu1 exactly.
  const double mu_raw = largest_weighted_eigenvalue(grid, g);
  if (!(mu_raw > 1e-300))
    throw degenerate_kernel("gaussian-toy: kernel is numerically zero, cannot rescale");
  const double c = mu1 / mu_raw;
  for (std::size_t i = 0; i < n * n; ++i) g.data()[i] *= c;
  return MemoryKernel(grid, std::move(g), KernelKind::gaussian_toy);
}

double fast_memory_value(double L, double T_W, double t, double tp, int nz) {
  std::vector<double> zn, zw;
  detail::gauss_legendre_standard(nz, zn, zw);
  double acc = 0.0;
  for (int m = 0; m < nz; ++m) {
    const double z = 0.5 * L * (zn[m] + 1.0);
    const double w = 0.5 * L * zw[m];
    acc += w * bessel_j0(2.0 * std::sqrt(z * (T_W - t))) *
           bessel_j0(2.0 * std::sqrt(z * (T_W - tp)));
  }
  return acc;
}

namespace {

// W(z_m, T_W - t_k) tabulated once; K = Wt diag(zw) Wt^T row by row. The inner
// accumulation order matches fast_memory_value, so both executions and the
// pointwise evaluator agree bitwise.
struct FastMemoryTable {
  std::vector<double> wt;  // n x nz
  std::vector<double> zw;  // nz
  std::size_t nz = 0;
};

FastMemoryTable fast_memory_table(const TimeGrid& grid, double L, int nz) {
  FastMemoryTable tab;
  std::vector<double> zn, zwstd;
  detail::gauss_legendre_standard(nz, zn, zwstd);
  tab.nz = static_cast<std::size_t>(nz);
  tab.zw.resize(tab.nz);
  std::vector<double> z(tab.nz);
  for (std::size_t m = 0; m < tab.nz; ++m) {
    z[m] = 0.5 * L * (zn[m] + 1.0);
    tab.zw[m] = 0.5 * L * zwstd[m];
  }
  const std::size_t n = grid.size();
  tab.wt.resize(n * tab.nz);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = grid.window() - grid.node(k);
    for (std::size_t m = 0; m < tab.nz; ++m)
      tab.wt[k * tab.nz + m] = bessel_j0(2.0 * std::sqrt(z[m] * u));
  }
  return tab;
}

inline double fast_memory_entry(const FastMemoryTable& tab, std::size_t k, std::size_t l) {
  const double* rk = tab.wt.data() + k * tab.nz;
  const double* rl = tab.wt.data() + l * tab.nz;
  double acc = 0.0;
  for (std::size_t m = 0; m < tab.nz; ++m) acc += tab.zw[m] * rk[m] * rl[m];
  return acc;
}

void fill_fast_memory_serial(const FastMemoryTable& tab, Matrix& g) {
  const std::size_t n = g.rows();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k; l < n; ++l) {
      const double v = fast_memory_entry(tab, k, l);
      g(k, l) = v;
      g(l, k) = v;
    }
}

void fill_fast_memory_parallel(const FastMemoryTable& tab, Matrix& g) {
  const std::size_t n = g.rows();
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k; l < n; ++l) {
      const double v = fast_memory_entry(tab, k, l);
      g(k, l) = v;
      g(l, k) = v;
    }
}

}  // namespace

MemoryKernel kernel_fast_memory(const TimeGrid& grid, double L, int nz, Execution exec) {
  if (!(L > 0.0)) throw invalid_parameter("fast-memory: L must be positive");
  if (nz < 2) throw invalid_parameter("fast-memory: nz must be >= 2");
  const FastMemoryTable tab = fast_memory_table(grid, L, nz);
  Matrix g(grid.size(), grid.size());
  if (exec == Execution::serial)
    fill_fast_memory_serial(tab, g);
  else
    fill_fast_memory_parallel(tab, g);

  const double mu1 = largest_weighted_eigenvalue(grid, g);
  if (mu1 * mu1 > 1.0 + 1e-9)
    throw unphysical_kernel("fast-memory: lambda_1 = " + std::to_string(mu1 * mu1) +
                            " exceeds 1 + 1e-9");
  return MemoryKernel(grid, std::move(g), KernelKind::fast_memory);
}

ExternalKernel kernel_from_matrix(const TimeGrid& grid, Matrix matrix) {
  const std::size_t n = grid.size();
  if (matrix.rows() != n || matrix.cols() != n)
    throw invalid_parameter("external kernel dimensions do not match grid");
  double residual = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l)
      residual = std::max(residual, std::abs(matrix(k, l) - matrix(l, k)));
  const double scale = max_abs(matrix);
  if (residual > 1e-6 * (scale > 0.0 ? scale : 1.0))
    throw nonsymmetric_kernel("external kernel asymmetry " + std::to_string(residual) +
                              " exceeds 1e-6 * max|G|");
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) {
      const double avg = 0.5 * (matrix(k, l) + matrix(l, k));
      matrix(k, l) = avg;
      matrix(l, k) = avg;
    }
  return ExternalKernel{MemoryKernel(grid, std::move(matrix), KernelKind::external), residual};
}

Matrix weighted_commutator_matrix(const MemoryKernel& kernel, Execution exec) {
  const TimeGrid& grid = kernel.grid();
  const std::size_t n = grid.size();
  Matrix c = weighted_square(kernel.matrix(), grid.weights(), exec);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      const double delta = (k == l) ? 1.0 / grid.weight(k) : 0.0;
      c(k, l) = std::sqrt(grid.weight(k)) * (delta - c(k, l)) * std::sqrt(grid.weight(l));
    }
  return c;
}

void save_kernel(const std::filesystem::path& path, const MemoryKernel& kernel) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  const TimeGrid& grid = kernel.grid();
  const std::size_t n = grid.size();
  out << n << ' ' << format_g17(grid.window()) << ' ' << to_string(grid.rule()) << '\n';
  for (std::size_t k = 0; k < n; ++k) out << (k ? " " : "") << format_g17(grid.node(k));
  out << '\n';
  for (std::size_t k = 0; k < n; ++k) out << (k ? " " : "") << format_g17(grid.weight(k));
  out << '\n';
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) out << (l ? " " : "") << format_g17(kernel(k, l));
    out << '\n';
  }
  if (!out) throw io_error("write to '" + path.string() + "' failed");
}

MemoryKernel load_kernel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open kernel file '" + path.string() + "'");
  std::size_t n = 0;
  double t_w = 0.0;
  std::string rule_name;
  if (!(in >> n >> t_w >> rule_name))
    throw io_error("kernel file '" + path.string() + "': bad header");
  if (n < 2) throw io_error("kernel file '" + path.string() + "': n must be >= 2");
  const QuadratureRule rule = quadrature_rule_from_string(rule_name);
  std::vector<double> nodes(n), weights(n);
  for (auto& v : nodes)
    if (!(in >> v)) throw io_error("kernel file '" + path.string() + "': truncated nodes");
  for (auto& v : weights)
    if (!(in >> v)) throw io_error("kernel file '" + path.string() + "': truncated weights");
  Matrix m(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      if (!(in >> m(k, l)))
        throw io_error("kernel file '" + path.string() + "': truncated matrix");
  TimeGrid grid(std::move(nodes), std::move(weights), t_w, rule);
  return kernel_from_matrix(grid, std::move(m)).kernel;
}

}  // namespace homsim
