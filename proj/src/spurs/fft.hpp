#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace spurs {

using cplx = std::complex<double>;

// Unnormalized 1D DFT of arbitrary length in natural (uncentered) order.
// Powers of two use an iterative radix-2 kernel; other lengths go through
// Bluestein's chirp-z reduction onto a power-of-two convolution.
class Fft1d {
 public:
  explicit Fft1d(std::size_t n);
  ~Fft1d();
  Fft1d(Fft1d&&) noexcept;
  Fft1d& operator=(Fft1d&&) noexcept;

  std::size_t size() const { return n_; }

  // X[k] = sum_n x[n] exp(-2 pi i k n / N)
  void forward(std::span<cplx> data) const;
  // x[n] = sum_k X[k] exp(+2 pi i k n / N)   (no 1/N)
  void backward(std::span<cplx> data) const;

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace spurs
