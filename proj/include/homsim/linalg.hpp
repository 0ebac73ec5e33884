#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "homsim/parallel.hpp"

namespace homsim {

// Dense row-major matrix of doubles. Deliberately minimal; everything in this
// project is small (n <= a few hundred) and symmetric.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_.data() + i * cols_, cols_);
  }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double max_abs(const Matrix& m);
double frobenius_norm(const Matrix& m);

// Eigendecomposition of a real symmetric matrix, values sorted descending,
// vectors() column j belonging to values()[j].
struct EigenSystem {
  std::vector<double> values;
  Matrix vectors;
};

// Cyclic Jacobi rotations. Converges to machine precision on the symmetric
// matrices this project produces; eigenvectors come out orthonormal to ~1e-15.
EigenSystem jacobi_eigensym(Matrix a, int max_sweeps = 64);

// (A diag(w) A)_kl = sum_m w_m A_km A_ml for symmetric A. Each output entry is
// accumulated serially in index order, so serial and parallel agree bitwise.
Matrix weighted_square(const Matrix& a, std::span<const double> w,
                       Execution exec = Execution::parallel);

}  // namespace homsim
