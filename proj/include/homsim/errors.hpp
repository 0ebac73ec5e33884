#pragma once

#include <stdexcept>
#include <string>

namespace homsim {

// Invalid argument to a builder or operation (bad counts, ranges, grid mismatch).
struct invalid_parameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Kernel whose Schmidt spectrum violates lambda_i <= 1 + tol, or whose
// weighted eigenproblem produces meaningfully negative eigenvalues.
struct unphysical_kernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Externally supplied kernel matrix rejected for asymmetry.
struct nonsymmetric_kernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kernel (or spectrum) with no usable weight at all.
struct degenerate_kernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Envelope weight dropped by the mode cutoff exceeds the configured bound.
struct insufficient_modes : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File parse / format problems on import paths.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace homsim
