#include "homsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace homsim {

double max_abs(const Matrix& m) {
  double v = 0.0;
  const double* p = m.data();
  for (std::size_t i = 0; i < m.rows() * m.cols(); ++i) v = std::max(v, std::abs(p[i]));
  return v;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  const double* p = m.data();
  for (std::size_t i = 0; i < m.rows() * m.cols(); ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

EigenSystem jacobi_eigensym(Matrix a, int max_sweeps) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::logic_error("jacobi_eigensym: matrix not square");

  Matrix v(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double norm = frobenius_norm(a);
  const double tol = 1e-15 * (norm > 0.0 ? norm : 1.0);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    off = std::sqrt(2.0 * off);
    if (off <= tol) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p), arq = a(r, q);
            a(r, p) = arp - s * (arq + tau * arp);
            a(r, q) = arq + s * (arp - tau * arq);
            a(p, r) = a(r, p);
            a(q, r) = a(r, q);
          }
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenSystem out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

namespace detail {

inline double weighted_square_entry(const Matrix& a, std::span<const double> w, std::size_t k,
                                    std::size_t l) {
  const std::size_t n = a.rows();
  double acc = 0.0;
  const double* rk = a.data() + k * n;
  const double* rl = a.data() + l * n;
  for (std::size_t m = 0; m < n; ++m) acc += w[m] * rk[m] * rl[m];
  return acc;
}

void weighted_square_serial(const Matrix& a, std::span<const double> w, Matrix& out) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k; l < n; ++l) {
      const double v = weighted_square_entry(a, w, k, l);
      out(k, l) = v;
      out(l, k) = v;
    }
}

void weighted_square_parallel(const Matrix& a, std::span<const double> w, Matrix& out) {
  const std::size_t n = a.rows();
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k; l < n; ++l) {
      const double v = weighted_square_entry(a, w, k, l);
      out(k, l) = v;
      out(l, k) = v;
    }
}

}  // namespace detail

Matrix weighted_square(const Matrix& a, std::span<const double> w, Execution exec) {
  if (a.rows() != a.cols() || a.rows() != w.size())
    throw std::logic_error("weighted_square: dimension mismatch");
  Matrix out(a.rows(), a.rows());
  if (exec == Execution::serial)
    detail::weighted_square_serial(a, w, out);
  else
    detail::weighted_square_parallel(a, w, out);
  return out;
}

}  // namespace homsim
