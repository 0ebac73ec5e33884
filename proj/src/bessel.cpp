#include "homsim/bessel.hpp"

#include <cmath>

namespace homsim {

namespace {

constexpr double kSeriesLimit = 16.0;

double j0_series(double x) {
  // J0(x) = sum_k (-1)^k (x^2/4)^k / (k!)^2. Alternating with large terms near
  // the series limit, so accumulate in long double to keep ~1e-13 after
  // cancellation.
  const long double q = (long double)x * (long double)x * 0.25L;
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 1; k < 80; ++k) {
    term *= -q / ((long double)k * (long double)k);
    sum += term;
    if (std::abs((double)term) < 1e-20 * (1.0 + std::abs((double)sum))) break;
  }
  return (double)sum;
}

double j0_asymptotic(double x) {
  // Hankel expansion: J0 = sqrt(2/(pi x)) [P cos(x - pi/4) - Q sin(x - pi/4)],
  // P = 1 - c2/x^2 + c4/x^4 - ..., Q = -c1/x + c3/x^3 - ...,
  // c_m = ((2m-1)!!)^2 / (m! 8^m). Truncated at the smallest term.
  long double p = 1.0L, q = 0.0L;
  long double term = 1.0L;
  long double prev = 1.0L;
  const long double xi = 1.0L / (long double)x;
  for (int m = 1; m <= 24; ++m) {
    const long double odd = 2.0L * m - 1.0L;
    term *= odd * odd / (8.0L * m) * xi;
    if (std::abs((double)term) > std::abs((double)prev)) break;  // divergent tail
    const int j = m / 2;
    if (m % 2 == 1) {
      q += (j % 2 == 0) ? -term : term;
    } else {
      p += (j % 2 == 1) ? -term : term;
    }
    prev = term;
    if (std::abs((double)term) < 1e-19) break;
  }
  const double chi = x - 0.25 * M_PI;
  return std::sqrt(2.0 / (M_PI * x)) * ((double)p * std::cos(chi) - (double)q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
  x = std::abs(x);  // even function
  if (x <= kSeriesLimit) return j0_series(x);
  return j0_asymptotic(x);
}

}  // namespace homsim
