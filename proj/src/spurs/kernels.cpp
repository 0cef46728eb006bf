#include "spurs/kernels.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "spurs/error.hpp"

namespace spurs {

KernelSpec KernelSpec::make(int degree) {
  if (degree < 0)
    throw ValidationError("B-spline degree must be >= 0, got " + std::to_string(degree));
  return KernelSpec{degree};
}

double bspline_eval(int degree, double t) {
  if (degree < 0)
    throw ValidationError("B-spline degree must be >= 0, got " + std::to_string(degree));
  const double a = std::abs(t);
  const double half_support = 0.5 * (degree + 1);
  if (degree == 0) {
    if (a < 0.5) return 1.0;
    return a == 0.5 ? 0.5 : 0.0;
  }
  if (!(a < half_support)) return 0.0;

  // Cox-de Boor on the uniform knots 0..p+1: after step d, piece[k] holds the
  // degree-d cardinal spline at u + k.
  const double x = a + half_support;
  const double j = std::floor(x);
  if (j > degree) return 0.0;  // a + (p+1)/2 rounded up to the knot p+1
  const double u = x - j;
  double piece[64];
  if (degree >= 63) throw ValidationError("B-spline degree too large");
  piece[0] = 1.0;
  for (int d = 1; d <= degree; ++d) {
    double next[64];
    for (int k = 0; k <= d; ++k) {
      double v = 0.0;
      if (k <= d - 1) v += (u + k) * piece[k];
      if (k >= 1) v += (d + 1 - u - k) * piece[k - 1];
      next[k] = v / d;
    }
    for (int k = 0; k <= d; ++k) piece[k] = next[k];
  }
  return piece[static_cast<int>(j)];
}

std::size_t Footprint::count() const {
  return dim == 1 ? taps[0].size() : taps[0].size() * taps[1].size();
}

Footprint footprint(std::span<const double> kappa, const GridSpec& grid,
                    const KernelSpec& kernel) {
  if (kappa.size() != static_cast<std::size_t>(grid.dim))
    throw ValidationError("footprint: point dimension does not match the grid");
  Footprint fp;
  fp.dim = grid.dim;
  const double extent = 0.5 * static_cast<double>(grid.n);
  const double sigma = grid.sigma();
  const long lo = -static_cast<long>(grid.half());
  const long hi = static_cast<long>(grid.half());  // exclusive
  const double hs = 0.5 * kernel.support();
  for (int d = 0; d < grid.dim; ++d) {
    const double k = kappa[d];
    if (!std::isfinite(k) || std::abs(k) > extent) {
      std::ostringstream msg;
      msg << "sample coordinate " << k << " lies outside the grid extent [-" << extent
          << ", " << extent << "]";
      throw OutOfExtentError(msg.str());
    }
    const double v = k * sigma;
    const long first = static_cast<long>(std::ceil(v - hs));
    const long last = static_cast<long>(std::floor(v + hs));
    for (long n = first; n <= last; ++n) {
      if (n < lo || n >= hi) continue;
      const double w = bspline_eval(kernel.degree, v - static_cast<double>(n));
      if (w != 0.0) fp.taps[d].push_back({n, w});
    }
  }
  return fp;
}

}  // namespace spurs
