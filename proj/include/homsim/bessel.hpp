#pragma once

namespace homsim {

// Bessel function of the first kind, order zero.
//
// Power series in long double for |x| <= 16, Hankel asymptotic expansion
// beyond. Absolute accuracy is ~1e-13 or better over the arguments reached by
// the kernel builders (x = 2*sqrt(z*t), typically < 50).
double bessel_j0(double x);

}  // namespace homsim
