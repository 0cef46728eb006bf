#pragma once

namespace spurs {

// Bessel function of the first kind, order 1. Power series below |x| = 12,
// Hankel asymptotic expansion above; absolute error under 1e-12.
double bessel_j1(double x);

// Modified Bessel function of the first kind, order 0 (power series).
double bessel_i0(double x);

}  // namespace spurs
