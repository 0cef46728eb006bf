#include "spurs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spurs/error.hpp"
#include "spurs/fft.hpp"
#include "spurs/parallel.hpp"

namespace spurs {

GridSpec GridSpec::make(int dim, std::size_t n, double sigma) {
  if (dim != 1 && dim != 2)
    throw ValidationError("grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (n == 0 || n % 2 != 0)
    throw ValidationError("grid size N must be a positive even integer, got " +
                          std::to_string(n));
  if (!(sigma >= 1.0) || !std::isfinite(sigma))
    throw ValidationError("oversampling factor must be >= 1");
  const double l = sigma * static_cast<double>(n);
  const double rounded = std::round(l);
  if (std::abs(l - rounded) > 1e-9 * std::max(1.0, l))
    throw ValidationError("sigma * N must be an integer (sigma=" +
                          std::to_string(sigma) + ", N=" + std::to_string(n) + ")");
  const auto size = static_cast<std::size_t>(rounded);
  if (size % 2 != 0)
    throw ValidationError("sigma * N must be even, got " + std::to_string(size));
  GridSpec g;
  g.dim = dim;
  g.n = n;
  g.size = size;
  return g;
}

std::size_t GridSpec::total() const {
  return dim == 1 ? size : size * size;
}

std::size_t GridSpec::image_total() const { return dim == 1 ? n : n * n; }

void centered_transform(std::span<cplx> data, int dim, std::size_t length,
                        int sign) {
  const std::size_t lines = dim == 1 ? 1 : length;
  if (data.size() != lines * length)
    throw ValidationError("array size does not match the grid shape");
  const Fft1d fft(length);
  const std::size_t half = length / 2;
  auto run = [&](std::span<cplx> line) {
    // Storage index i holds logical index i - L/2; rotating by L/2 puts the
    // logical origin first, which is the natural FFT order.
    std::rotate(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(half), line.end());
    if (sign < 0)
      fft.forward(line);
    else
      fft.backward(line);
    std::rotate(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(half), line.end());
  };
  if (dim == 1) {
    run(data);
    return;
  }
  // Rows (dimension 1, contiguous).
  parallel_for(length, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) run(data.subspan(r * length, length));
  }, 8);
  // Columns (dimension 0).
  parallel_for(length, [&](std::size_t b, std::size_t e) {
    std::vector<cplx> col(length);
    for (std::size_t c = b; c < e; ++c) {
      for (std::size_t r = 0; r < length; ++r) col[r] = data[r * length + c];
      run(col);
      for (std::size_t r = 0; r < length; ++r) data[r * length + c] = col[r];
    }
  }, 8);
}

ComplexGrid forward_dft(const GridSpec& spec, std::span<const cplx> image) {
  if (image.size() != spec.total())
    throw ValidationError("forward_dft: expected " + std::to_string(spec.total()) +
                          " values, got " + std::to_string(image.size()));
  ComplexGrid out{spec, std::vector<cplx>(image.begin(), image.end())};
  centered_transform(out.values, spec.dim, spec.size, -1);
  return out;
}

std::vector<cplx> inverse_dft(const ComplexGrid& kgrid) {
  if (kgrid.values.size() != kgrid.spec.total())
    throw ValidationError("inverse_dft: value count does not match the grid shape");
  std::vector<cplx> out = kgrid.values;
  centered_transform(out, kgrid.spec.dim, kgrid.spec.size, +1);
  const double scale = 1.0 / static_cast<double>(kgrid.spec.total());
  for (auto& v : out) v *= scale;
  return out;
}

ImageGrid crop_to_fov(std::span<const cplx> image, const GridSpec& spec) {
  if (image.size() != spec.total())
    throw ValidationError("crop_to_fov: image size does not match the grid");
  const std::size_t l = spec.size, n = spec.n, off = (l - n) / 2;
  ImageGrid out{spec, std::vector<cplx>(spec.image_total())};
  if (spec.dim == 1) {
    std::copy_n(image.begin() + static_cast<std::ptrdiff_t>(off), n, out.pixels.begin());
  } else {
    for (std::size_t r = 0; r < n; ++r)
      std::copy_n(image.begin() + static_cast<std::ptrdiff_t>((r + off) * l + off), n,
                  out.pixels.begin() + static_cast<std::ptrdiff_t>(r * n));
  }
  return out;
}

std::vector<cplx> zero_pad(const ImageGrid& image) {
  const auto& spec = image.spec;
  if (image.pixels.size() != spec.image_total())
    throw ValidationError("zero_pad: image size does not match the grid");
  const std::size_t l = spec.size, n = spec.n, off = (l - n) / 2;
  std::vector<cplx> out(spec.total());
  if (spec.dim == 1) {
    std::copy(image.pixels.begin(), image.pixels.end(),
              out.begin() + static_cast<std::ptrdiff_t>(off));
  } else {
    for (std::size_t r = 0; r < n; ++r)
      std::copy_n(image.pixels.begin() + static_cast<std::ptrdiff_t>(r * n), n,
                  out.begin() + static_cast<std::ptrdiff_t>((r + off) * l + off));
  }
  return out;
}

}  // namespace spurs
