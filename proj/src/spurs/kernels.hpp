#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "spurs/grid.hpp"

namespace spurs {

struct KernelSpec {
  int degree = 3;
  int support() const { return degree + 1; }
  static KernelSpec make(int degree);
};

// Centered cardinal B-spline of degree p at offset t (grid units). Zero for
// |t| >= (p+1)/2 except beta^0(+-1/2) = 1/2. Symmetric and nonnegative.
double bspline_eval(int degree, double t);

// Nonzero kernel weights of one k-space point, per dimension. The 2D
// footprint is the tensor product of the two lists.
struct Footprint {
  struct Tap {
    long index;  // logical grid index in [-L/2, L/2)
    double weight;
  };
  int dim = 1;
  std::array<std::vector<Tap>, 2> taps;

  std::size_t count() const;
  bool empty() const { return count() == 0; }
};

// Taps of kappa (k-space units) on the grid; weights are evaluated in units of
// the oversampled grid spacing and clipped to the grid without wraparound.
// Throws OutOfExtentError when |kappa_d| > N/2 for some dimension.
Footprint footprint(std::span<const double> kappa, const GridSpec& grid,
                    const KernelSpec& kernel);

}  // namespace spurs
