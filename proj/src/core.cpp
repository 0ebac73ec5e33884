#include "homsim/core.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace homsim {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw invalid_parameter(std::string(name) + " must be strictly positive");
}

}  // namespace

void UnitsConfig::validate() const {
  require_positive(rabi_frequency, "rabi_frequency");
  require_positive(coupling_constant, "coupling_constant");
  require_positive(linear_concentration, "linear_concentration");
  require_positive(cell_length, "cell_length");
  require_positive(write_time, "write_time");
  require_positive(relaxation_rate, "relaxation_rate");
}

bool UnitsConfig::fast_protocol_ok(double threshold) const {
  return relaxation_rate * write_time < threshold;
}

void DimensionlessParams::validate() const {
  require_positive(T_W, "T_W");
  require_positive(L, "L");
}

DimensionlessParams to_dimensionless(const UnitsConfig& units) {
  units.validate();
  DimensionlessParams p;
  p.T_W = units.rabi_frequency * units.write_time;
  p.L = 2.0 * units.coupling_constant * units.coupling_constant * units.linear_concentration *
        units.cell_length / units.rabi_frequency;
  return p;
}

std::string to_string(QuadratureRule rule) {
  return rule == QuadratureRule::trapezoid ? "trapezoid" : "gauss-legendre";
}

QuadratureRule quadrature_rule_from_string(const std::string& name) {
  if (name == "trapezoid") return QuadratureRule::trapezoid;
  if (name == "gauss-legendre") return QuadratureRule::gauss_legendre;
  throw invalid_parameter("unknown quadrature rule '" + name + "'");
}

TimeGrid::TimeGrid(std::vector<double> nodes, std::vector<double> weights, double window,
                   QuadratureRule rule)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), window_(window), rule_(rule) {
  if (nodes_.size() < 2) throw invalid_parameter("grid needs at least 2 points");
  if (weights_.size() != nodes_.size())
    throw invalid_parameter("node/weight count mismatch");
  require_positive(window_, "T_W");
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (k > 0 && !(nodes_[k] > nodes_[k - 1]))
      throw invalid_parameter("grid nodes must be strictly increasing");
    if (nodes_[k] < 0.0 || nodes_[k] > window_)
      throw invalid_parameter("grid nodes must lie in [0, T_W]");
    if (!(weights_[k] > 0.0)) throw invalid_parameter("grid weights must be positive");
    sum += weights_[k];
  }
  if (std::abs(sum - window_) > 1e-12 * window_)
    throw invalid_parameter("grid weights do not sum to T_W");
}

double TimeGrid::integrate(std::span<const double> samples) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) acc += weights_[k] * samples[k];
  return acc;
}

std::complex<double> TimeGrid::integrate(std::span<const std::complex<double>> samples) const {
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) acc += weights_[k] * samples[k];
  return acc;
}

namespace detail {

void gauss_legendre_standard(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

}  // namespace detail

TimeGrid make_grid(int n, double T_W, QuadratureRule rule) {
  if (n < 2) throw invalid_parameter("make_grid: n must be >= 2");
  require_positive(T_W, "T_W");
  std::vector<double> nodes(n), weights(n);
  if (rule == QuadratureRule::trapezoid) {
    const double h = T_W / (n - 1);
    for (int k = 0; k < n; ++k) {
      nodes[k] = k * h;
      weights[k] = (k == 0 || k == n - 1) ? 0.5 * h : h;
    }
    nodes[n - 1] = T_W;  // avoid endpoint drift from k*h rounding
  } else {
    detail::gauss_legendre_standard(n, nodes, weights);
    for (int k = 0; k < n; ++k) {
      nodes[k] = 0.5 * T_W * (nodes[k] + 1.0);
      weights[k] *= 0.5 * T_W;
    }
  }
  return TimeGrid(std::move(nodes), std::move(weights), T_W, rule);
}

}  // namespace homsim
