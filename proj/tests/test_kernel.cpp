#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include "homsim/bessel.hpp"
#include "homsim/errors.hpp"
#include "homsim/kernel.hpp"
#include "homsim/schmidt.hpp"

using namespace homsim;

namespace {

struct Lcg {
  std::uint64_t s = 0x9e3779b97f4a7c15ULL;
  double next() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
  }
};

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("ideal kernel is the discrete delta") {
  const TimeGrid grid = make_grid(2, 1.0, QuadratureRule::trapezoid);
  const MemoryKernel k = kernel_ideal(grid);
  CHECK(k(0, 0) == 2.0);
  CHECK(k(1, 1) == 2.0);
  CHECK(k(0, 1) == 0.0);
  CHECK(k.symmetry_residual() == 0.0);
}

TEST_CASE("ideal kernel reproduces sampled envelopes") {
  const TimeGrid grid = make_grid(37, 2.0, QuadratureRule::gauss_legendre);
  const MemoryKernel k = kernel_ideal(grid);
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(3.0 * grid.node(i)) + 0.2;
  const std::vector<double> out = k.apply(f);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(std::abs(out[i] - f[i]) <= 1e-15 * std::abs(f[i]));
}

TEST_CASE("gaussian-toy rescaling pins the leading singular value") {
  const TimeGrid grid = make_grid(64, 1.0, QuadratureRule::gauss_legendre);
  const MemoryKernel k = kernel_gaussian_toy(grid, 0.1, 0.9);
  const SchmidtDecomposition dec = decompose(k);
  CHECK(dec.lambda(0) == doctest::Approx(0.81).epsilon(1e-12));
}

TEST_CASE("gaussian-toy in the separable limit is rank one") {
  const TimeGrid grid = make_grid(32, 1.0, QuadratureRule::gauss_legendre);
  const MemoryKernel k = kernel_gaussian_toy(grid, 1e8, 0.7);
  const SchmidtDecomposition dec = decompose(k, 0.0);
  CHECK(dec.lambda(0) == doctest::Approx(0.49).epsilon(1e-10));
  CHECK(dec.lambda(1) < 1e-10);
}

TEST_CASE("gaussian-toy spectrum is stable under grid refinement") {
  const TimeGrid g64 = make_grid(64, 1.0, QuadratureRule::gauss_legendre);
  const TimeGrid g128 = make_grid(128, 1.0, QuadratureRule::gauss_legendre);
  const SchmidtDecomposition d64 = decompose(kernel_gaussian_toy(g64, 0.1, 0.9));
  const SchmidtDecomposition d128 = decompose(kernel_gaussian_toy(g128, 0.1, 0.9));
  const double r64 = d64.lambda(1) / d64.lambda(0);
  const double r128 = d128.lambda(1) / d128.lambda(0);
  CHECK(std::abs(r64 - r128) / r128 < 1e-6);
}

TEST_CASE("builders run their parameter checks") {
  const TimeGrid grid = make_grid(8, 1.0, QuadratureRule::gauss_legendre);
  CHECK_THROWS_AS(kernel_gaussian_toy(grid, 0.0, 0.9), invalid_parameter);
  CHECK_THROWS_AS(kernel_gaussian_toy(grid, 0.1, 0.0), invalid_parameter);
  CHECK_THROWS_AS(kernel_gaussian_toy(grid, 0.1, 1.5), invalid_parameter);
  CHECK_THROWS_AS(kernel_fast_memory(grid, 0.0, 16), invalid_parameter);
  CHECK_THROWS_AS(kernel_fast_memory(grid, 1.0, 1), invalid_parameter);
}

TEST_CASE("fast-memory kernel is symmetric by construction") {
  const TimeGrid grid = make_grid(48, 1.0, QuadratureRule::gauss_legendre);
  const MemoryKernel k = kernel_fast_memory(grid, 1.0, 48);
  CHECK(k.symmetry_residual() == 0.0);
}

TEST_CASE("fast-memory endpoint value equals L") {
  // At t = t' = T_W both W arguments vanish and K = int_0^L J0(0)^2 dz = L.
  CHECK(fast_memory_value(0.7, 1.0, 1.0, 1.0, 33) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(bessel_j0(0.0) == 1.0);

  // A trapezoid grid contains the endpoint, so the last diagonal entry is L.
  const TimeGrid grid = make_grid(17, 1.0, QuadratureRule::trapezoid);
  const MemoryKernel k = kernel_fast_memory(grid, 0.7, 33);
  CHECK(k(16, 16) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("fast-memory matrix matches the pointwise evaluator") {
  const TimeGrid grid = make_grid(9, 1.3, QuadratureRule::gauss_legendre);
  const MemoryKernel k = kernel_fast_memory(grid, 0.8, 21);
  // The fill accumulates upper-triangle entries in the same product order as
  // the evaluator, so those agree bitwise; the mirrored half to rounding.
  for (std::size_t a : {std::size_t{0}, std::size_t{4}, std::size_t{8}})
    for (std::size_t b : {std::size_t{2}, std::size_t{7}}) {
      const double direct = fast_memory_value(0.8, 1.3, grid.node(a), grid.node(b), 21);
      if (a <= b)
        CHECK(k(a, b) == direct);
      else
        CHECK(k(a, b) == doctest::Approx(direct).epsilon(1e-14));
    }
}

TEST_CASE("fast-memory spectrum is physical and refines cleanly") {
  const TimeGrid g64 = make_grid(64, 1.0, QuadratureRule::gauss_legendre);
  const SchmidtDecomposition d64 = decompose(kernel_fast_memory(g64, 1.0, 64), 0.0);
  CHECK(d64.lambda(0) <= 1.0 + 1e-9);
  for (std::size_t i = 0; i < d64.retained(); ++i) {
    CHECK(d64.lambda(i) >= 0.0);
    if (i > 0) CHECK(d64.lambda(i) <= d64.lambda(i - 1));
  }

  // Refinement drift on the top eigenvalues. At L = 1 the spectrum falls off
  // so fast that lambda_4 already sits at the quadrature noise floor, so the
  // five-eigenvalue check runs at L = 8 where all of them are resolved.
  const TimeGrid g128 = make_grid(128, 1.0, QuadratureRule::gauss_legendre);
  const SchmidtDecomposition d128 = decompose(kernel_fast_memory(g128, 1.0, 64), 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(d64.lambda(i) - d128.lambda(i)) / d128.lambda(i) < 1e-4);

  const SchmidtDecomposition w64 = decompose(kernel_fast_memory(g64, 8.0, 64), 0.0);
  const SchmidtDecomposition w128 = decompose(kernel_fast_memory(g128, 8.0, 64), 0.0);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(std::abs(w64.lambda(i) - w128.lambda(i)) / w128.lambda(i) < 1e-4);
}

TEST_CASE("fast-memory eigenvalues depend only on the product L*T_W") {
  const TimeGrid a = make_grid(64, 1.0, QuadratureRule::gauss_legendre);
  const TimeGrid b = make_grid(64, 2.0, QuadratureRule::gauss_legendre);
  const SchmidtDecomposition da = decompose(kernel_fast_memory(a, 2.0, 64));
  const SchmidtDecomposition db = decompose(kernel_fast_memory(b, 1.0, 64));
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(da.lambda(i) == doctest::Approx(db.lambda(i)).epsilon(1e-8));
}

TEST_CASE("serial and parallel kernel fills agree bitwise") {
  const TimeGrid grid = make_grid(40, 1.0, QuadratureRule::gauss_legendre);
  CHECK(kernel_fast_memory(grid, 1.0, 32, Execution::serial).matrix() ==
        kernel_fast_memory(grid, 1.0, 32, Execution::parallel).matrix());
  CHECK(kernel_gaussian_toy(grid, 0.15, 0.8, Execution::serial).matrix() ==
        kernel_gaussian_toy(grid, 0.15, 0.8, Execution::parallel).matrix());
}

TEST_CASE("commutator matrix of the ideal kernel vanishes") {
  const TimeGrid grid = make_grid(24, 1.0, QuadratureRule::gauss_legendre);
  const Matrix c = weighted_commutator_matrix(kernel_ideal(grid));
  CHECK(max_abs(c) <= 1e-10);
}

TEST_CASE("commutator matrix of the fast-memory kernel is PSD") {
  const TimeGrid grid = make_grid(48, 1.0, QuadratureRule::gauss_legendre);
  const Matrix cs = weighted_commutator_matrix(kernel_fast_memory(grid, 1.0, 48),
                                               Execution::serial);
  const Matrix cp = weighted_commutator_matrix(kernel_fast_memory(grid, 1.0, 48),
                                               Execution::parallel);
  CHECK(cs == cp);
  const EigenSystem eig = jacobi_eigensym(cs);
  CHECK(eig.values.back() >= -1e-9);
}

TEST_CASE("external kernels: symmetrisation and rejection") {
  const TimeGrid grid = make_grid(6, 1.0, QuadratureRule::gauss_legendre);
  const MemoryKernel ideal = kernel_ideal(grid);

  // The exact ideal matrix passes through unchanged.
  ExternalKernel same = kernel_from_matrix(grid, ideal.matrix());
  CHECK(same.kernel.matrix() == ideal.matrix());
  CHECK(same.kernel.kind() == KernelKind::external);
  CHECK(same.asymmetry_residual == 0.0);

  // Small asymmetry is averaged away and recorded.
  Matrix noisy = ideal.matrix();
  const double scale = max_abs(noisy);
  noisy(1, 2) += 1e-8 * scale;
  ExternalKernel fixed = kernel_from_matrix(grid, noisy);
  CHECK(fixed.asymmetry_residual == doctest::Approx(1e-8 * scale).epsilon(1e-6));
  CHECK(fixed.kernel.symmetry_residual() == 0.0);

  // A residual of 1e-3 * scale is rejected.
  Matrix bad = ideal.matrix();
  bad(0, 3) += 1e-3 * scale;
  CHECK_THROWS_AS(kernel_from_matrix(grid, bad), nonsymmetric_kernel);

  Matrix wrong_shape(4, 4, 0.0);
  CHECK_THROWS_AS(kernel_from_matrix(grid, wrong_shape), invalid_parameter);
}

TEST_CASE("random PSD matrix with eigenvalues in [0,1] is accepted") {
  const TimeGrid grid = make_grid(12, 1.0, QuadratureRule::gauss_legendre);
  const std::size_t n = grid.size();
  Lcg rng;

  // Random orthogonal basis from the eigenvectors of a random symmetric seed.
  Matrix seed(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) seed(i, j) = seed(j, i) = rng.next();
  const EigenSystem basis = jacobi_eigensym(seed);

  std::vector<double> mu(n);
  for (auto& v : mu) v = 0.5 * (rng.next() + 0.5) + 0.25;  // within (0, 1)
  Matrix g(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        acc += basis.vectors(i, m) * mu[m] * basis.vectors(j, m);
      g(i, j) = acc / std::sqrt(grid.weight(i) * grid.weight(j));
    }

  const ExternalKernel ext = kernel_from_matrix(grid, g);
  const SchmidtDecomposition dec = decompose(ext.kernel, 0.0);
  for (std::size_t i = 0; i < dec.retained(); ++i) {
    CHECK(dec.lambda(i) >= 0.0);
    CHECK(dec.lambda(i) <= 1.0 + 1e-9);
  }
}

TEST_CASE("kernel files round-trip bitwise") {
  const TimeGrid grid = make_grid(20, 1.25, QuadratureRule::gauss_legendre);
  const MemoryKernel k = kernel_gaussian_toy(grid, 0.2, 0.75);
  const auto path = temp_file("homsim_kernel_roundtrip.txt");
  save_kernel(path, k);
  const MemoryKernel loaded = load_kernel(path);
  CHECK(loaded.matrix() == k.matrix());
  CHECK(loaded.grid() == k.grid());
  CHECK(loaded.kind() == KernelKind::external);

  const TimeGrid uniform = make_grid(11, 2.0, QuadratureRule::trapezoid);
  const MemoryKernel fast = kernel_fast_memory(uniform, 0.5, 17);
  save_kernel(path, fast);
  const MemoryKernel again = load_kernel(path);
  CHECK(again.matrix() == fast.matrix());
  CHECK(again.grid().rule() == QuadratureRule::trapezoid);
  std::filesystem::remove(path);
}

TEST_CASE("kernel loader rejects malformed files") {
  const auto path = temp_file("homsim_kernel_bad.txt");
  {
    std::ofstream out(path);
    out << "4 1.0 gauss-legendre\n0.1 0.2 0.3\n";  // truncated
  }
  CHECK_THROWS_AS(load_kernel(path), io_error);
  {
    std::ofstream out(path);
    out << "4 1.0 simpson\n";
  }
  CHECK_THROWS_AS(load_kernel(path), invalid_parameter);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_kernel(path), io_error);
}
