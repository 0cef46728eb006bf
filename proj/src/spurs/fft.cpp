#include "spurs/fft.hpp"

#include <cmath>
#include <numbers>

#include "spurs/error.hpp"

namespace spurs {
namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Radix-2 decimation-in-time transform with a precomputed twiddle table.
class Radix2 {
 public:
  explicit Radix2(std::size_t n) : n_(n), twiddle_(n / 2), rev_(n) {
    for (std::size_t k = 0; k < n / 2; ++k)
      twiddle_[k] = std::polar(1.0, -2.0 * std::numbers::pi *
                                        static_cast<double>(k) /
                                        static_cast<double>(n));
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      rev_[i] = r;
    }
  }

  void run(cplx* x, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (i < rev_[i]) std::swap(x[i], x[rev_[i]]);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      std::size_t half = len / 2, stride = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          cplx w = twiddle_[k * stride];
          if (inverse) w = std::conj(w);
          cplx a = x[start + k];
          cplx b = x[start + k + half] * w;
          x[start + k] = a + b;
          x[start + k + half] = a - b;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<cplx> twiddle_;
  std::vector<std::size_t> rev_;
};

}  // namespace

struct Fft1d::Impl {
  bool direct = true;
  std::unique_ptr<Radix2> radix2;
  // Bluestein state
  std::size_t m = 0;
  std::vector<cplx> chirp;         // exp(-i pi k^2 / n), k < n
  std::vector<cplx> chirp_hat;     // FFT_m of conj chirp, wrapped
};

Fft1d::Fft1d(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n == 0) throw ValidationError("FFT length must be positive");
  if (is_pow2(n)) {
    impl_->radix2 = std::make_unique<Radix2>(n);
    return;
  }
  impl_->direct = false;
  impl_->m = next_pow2(2 * n - 1);
  impl_->radix2 = std::make_unique<Radix2>(impl_->m);
  impl_->chirp.resize(n);
  const std::size_t two_n = 2 * n;
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small.
    std::size_t k2 = (k * k) % two_n;
    impl_->chirp[k] = std::polar(
        1.0, -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n));
  }
  impl_->chirp_hat.assign(impl_->m, cplx{});
  impl_->chirp_hat[0] = std::conj(impl_->chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    impl_->chirp_hat[k] = std::conj(impl_->chirp[k]);
    impl_->chirp_hat[impl_->m - k] = std::conj(impl_->chirp[k]);
  }
  impl_->radix2->run(impl_->chirp_hat.data(), false);
}

Fft1d::~Fft1d() = default;
Fft1d::Fft1d(Fft1d&&) noexcept = default;
Fft1d& Fft1d::operator=(Fft1d&&) noexcept = default;

void Fft1d::forward(std::span<cplx> data) const {
  if (data.size() != n_) throw ValidationError("FFT length mismatch");
  if (impl_->direct) {
    impl_->radix2->run(data.data(), false);
    return;
  }
  const std::size_t m = impl_->m;
  std::vector<cplx> work(m, cplx{});
  for (std::size_t k = 0; k < n_; ++k) work[k] = data[k] * impl_->chirp[k];
  impl_->radix2->run(work.data(), false);
  for (std::size_t k = 0; k < m; ++k) work[k] *= impl_->chirp_hat[k];
  impl_->radix2->run(work.data(), true);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n_; ++k)
    data[k] = work[k] * inv_m * impl_->chirp[k];
}

void Fft1d::backward(std::span<cplx> data) const {
  // conj(F(conj(x))) gives the positive-exponent transform.
  for (auto& v : data) v = std::conj(v);
  forward(data);
  for (auto& v : data) v = std::conj(v);
}

}  // namespace spurs
