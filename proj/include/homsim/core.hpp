#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "homsim/errors.hpp"

namespace homsim {

// Physical memory-cell parameters. Signs of the drive (Omega_1 = +/- Omega_2)
// select the readout stage and are handled downstream; only magnitudes live
// here.
struct UnitsConfig {
  double rabi_frequency = 0.0;        // Omega, rad/s
  double coupling_constant = 0.0;     // g, rad/s
  double linear_concentration = 0.0;  // N, atoms per unit length
  double cell_length = 0.0;           // L_phys
  double write_time = 0.0;            // T_W_phys, s (readout window T_R = T_W)
  double relaxation_rate = 0.0;       // gamma, rad/s

  // Throws invalid_parameter naming the offending field.
  void validate() const;

  // Fast-protocol regime check: gamma * T_W_phys < threshold. A violation is
  // a warning for callers to surface, never an error.
  bool fast_protocol_ok(double threshold = 0.1) const;
};

struct DimensionlessParams {
  double T_W = 0.0;  // Omega * T_W_phys
  double L = 0.0;    // 2 g^2 N L_phys / Omega

  void validate() const;
};

DimensionlessParams to_dimensionless(const UnitsConfig& units);

enum class QuadratureRule { trapezoid, gauss_legendre };

std::string to_string(QuadratureRule rule);
QuadratureRule quadrature_rule_from_string(const std::string& name);

// Quadrature discretisation of the write window [0, T_W]. Immutable after
// construction; shared read-only across workers.
class TimeGrid {
 public:
  TimeGrid(std::vector<double> nodes, std::vector<double> weights, double window,
           QuadratureRule rule);

  std::size_t size() const { return nodes_.size(); }
  double node(std::size_t k) const { return nodes_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  double window() const { return window_; }
  QuadratureRule rule() const { return rule_; }

  double integrate(std::span<const double> samples) const;
  std::complex<double> integrate(std::span<const std::complex<double>> samples) const;

  bool operator==(const TimeGrid& other) const = default;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double window_ = 0.0;
  QuadratureRule rule_ = QuadratureRule::gauss_legendre;
};

// n >= 2 quadrature points on [0, T_W]. Gauss-Legendre is the default choice
// elsewhere; trapezoid gives a uniform grid for externally sampled kernels.
TimeGrid make_grid(int n, double T_W, QuadratureRule rule);

namespace detail {
// Standard-interval Gauss-Legendre rule on [-1, 1], nodes ascending.
void gauss_legendre_standard(int n, std::vector<double>& nodes, std::vector<double>& weights);
}  // namespace detail

}  // namespace homsim
