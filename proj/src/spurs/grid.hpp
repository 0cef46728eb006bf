#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace spurs {

using cplx = std::complex<double>;

// Cartesian reconstruction grid. k-space coordinates are in units of 1/FOV
// (base spacing 1); node n sits at k_n = n / sigma with n in [-L/2, L/2),
// L = sigma * N. Oversampling densifies the grid but never extends it.
struct GridSpec {
  int dim = 1;
  std::size_t n = 0;     // base points per dimension (even)
  std::size_t size = 0;  // L = sigma * n, points per dimension (even)

  // Rejects odd N, sigma < 1, and sigma * N that is not an even integer.
  static GridSpec make(int dim, std::size_t n, double sigma);

  double sigma() const { return static_cast<double>(size) / static_cast<double>(n); }
  std::size_t half() const { return size / 2; }
  std::size_t total() const;        // L^dim
  std::size_t image_total() const;  // N^dim
  bool operator==(const GridSpec&) const = default;
};

// Values on the (oversampled) grid, row-major with dimension 0 outermost.
// Storage index i maps to logical index n = i - L/2 along each dimension.
struct ComplexGrid {
  GridSpec spec;
  std::vector<cplx> values;
};

// Image on the original FOV: N^dim pixels, pixel n at x_n = n / N (FOV units).
struct ImageGrid {
  GridSpec spec;
  std::vector<cplx> pixels;
};

// Centered DFT, X[k] = sum_n x[n] exp(-2 pi i k.n / L), no normalization.
ComplexGrid forward_dft(const GridSpec& spec, std::span<const cplx> image);

// Centered inverse DFT carrying 1 / L^dim.
std::vector<cplx> inverse_dft(const ComplexGrid& kgrid);

// Keeps the central N^dim block of an L^dim image.
ImageGrid crop_to_fov(std::span<const cplx> image, const GridSpec& spec);

// Zero-extends an N^dim image to L^dim; crop_to_fov inverts it.
std::vector<cplx> zero_pad(const ImageGrid& image);

// In-place centered transform along every dimension of an L^dim array.
// sign < 0 is the forward kernel; no scaling is applied either way.
void centered_transform(std::span<cplx> data, int dim, std::size_t length,
                        int sign);

}  // namespace spurs
