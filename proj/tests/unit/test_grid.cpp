#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spurs/error.hpp"
#include "spurs/fft.hpp"
#include "spurs/grid.hpp"
#include "unit/support.hpp"

using namespace spurs;

namespace {

// Direct O(L^2) centered DFT, the oracle for the fast path.
std::vector<cplx> naive_centered_dft(const std::vector<cplx>& x, int sign) {
  const long l = static_cast<long>(x.size());
  std::vector<cplx> out(x.size());
  for (long k = 0; k < l; ++k) {
    cplx s{};
    for (long n = 0; n < l; ++n) {
      const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>((k - l / 2) * (n - l / 2)) / static_cast<double>(l);
      s += x[static_cast<std::size_t>(n)] * std::polar(1.0, ang);
    }
    out[static_cast<std::size_t>(k)] = s;
  }
  return out;
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK(GridSpec::make(2, 8, 2.0).size == 16);
  CHECK(GridSpec::make(1, 10, 1.2).size == 12);
  CHECK_THROWS_AS(GridSpec::make(1, 7, 1.0), ValidationError);
  CHECK_THROWS_AS(GridSpec::make(1, 8, 0.5), ValidationError);
  CHECK_THROWS_AS(GridSpec::make(1, 8, 1.3), ValidationError);   // 10.4 not integral
  CHECK_THROWS_AS(GridSpec::make(1, 10, 1.1), ValidationError);  // 11 is odd
  CHECK_THROWS_AS(GridSpec::make(3, 8, 1.0), ValidationError);
  const auto g = GridSpec::make(2, 8, 1.5);
  CHECK(g.total() == 144);
  CHECK(g.image_total() == 64);
}

TEST_CASE("fft matches the direct sum for power-of-two and other lengths") {
  for (std::size_t n : {1u, 2u, 8u, 12u, 30u, 64u, 97u}) {
    auto x = test::random_complex(n, n);
    auto y = x;
    Fft1d f(n);
    f.forward(y);
    for (std::size_t k = 0; k < n; ++k) {
      cplx s{};
      for (std::size_t j = 0; j < n; ++j)
        s += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * j % n) / static_cast<double>(n));
      CHECK(std::abs(y[k] - s) <= 1e-10 * static_cast<double>(n));
    }
    f.backward(y);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(y[j] / static_cast<double>(n) - x[j]) <= 1e-12 * static_cast<double>(n));
  }
}

TEST_CASE("centered dft: impulse, constant and inversion") {
  const auto spec = GridSpec::make(1, 8, 2.0);
  std::vector<cplx> delta(16, 0.0);
  delta[8] = 1.0;  // n = 0
  auto d = forward_dft(spec, delta);
  for (const auto& v : d.values) CHECK(std::abs(v - cplx(1.0)) < 1e-14);

  std::vector<cplx> ones(16, 1.0);
  auto o = forward_dft(spec, ones);
  for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(o.values[i] - cplx(i == 8 ? 16.0 : 0.0)) < 1e-12);

  ComplexGrid k{spec, std::vector<cplx>(16, 0.0)};
  k.values[8] = 16.0;
  for (const auto& v : inverse_dft(k)) CHECK(std::abs(v - cplx(1.0)) < 1e-14);
  ComplexGrid z{spec, std::vector<cplx>(16, 0.0)};
  for (const auto& v : inverse_dft(z)) CHECK(v == cplx(0.0));
}

TEST_CASE("centered dft agrees with the direct centered sum") {
  const auto spec = GridSpec::make(1, 10, 1.2);
  const auto x = test::random_complex(12, 3);
  const auto ref = naive_centered_dft(x, -1);
  const auto got = forward_dft(spec, x);
  CHECK(test::max_abs_diff(got.values, ref) <= 1e-12 * test::max_abs(ref));
}

TEST_CASE("2d round trip and Parseval") {
  for (double sigma : {1.0, 1.5, 2.0}) {
    const auto spec = GridSpec::make(2, 8, sigma);
    const auto x = test::random_complex(spec.total(), 11);
    const auto k = forward_dft(spec, x);
    const auto back = inverse_dft(k);
    CHECK(test::max_abs_diff(back, x) <= 1e-12 * test::max_abs(x));
    double ex = 0, ek = 0;
    for (const auto& v : x) ex += std::norm(v);
    for (const auto& v : k.values) ek += std::norm(v);
    CHECK(std::abs(ex - ek / static_cast<double>(spec.total())) <= 1e-10 * ex);
  }
}

TEST_CASE("2d transform is separable with dimension 0 outermost") {
  const auto spec = GridSpec::make(2, 4, 1.0);
  std::vector<cplx> x(16, 0.0);
  // Impulse at logical (n0, n1) = (1, 0): phase varies along dimension 0 only.
  x[(1 + 2) * 4 + 2] = 1.0;
  const auto k = forward_dft(spec, x);
  for (long k0 = -2; k0 < 2; ++k0)
    for (long k1 = -2; k1 < 2; ++k1) {
      const cplx want = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k0) / 4.0);
      CHECK(std::abs(k.values[static_cast<std::size_t>((k0 + 2) * 4 + (k1 + 2))] - want) < 1e-14);
    }
}

TEST_CASE("crop and zero padding") {
  const auto s1 = GridSpec::make(1, 4, 2.0);
  std::vector<cplx> x(8);
  for (int i = 0; i < 8; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(i - 4);  // value = logical index
  const auto c = crop_to_fov(x, s1);
  REQUIRE(c.pixels.size() == 4);
  CHECK(c.pixels[0] == cplx(-2));
  CHECK(c.pixels[3] == cplx(1));

  const auto id = GridSpec::make(2, 6, 1.0);
  const auto y = test::random_complex(36, 5);
  CHECK(crop_to_fov(y, id).pixels == y);

  const auto s2 = GridSpec::make(2, 6, 2.0);
  ImageGrid img{s2, test::random_complex(36, 6)};
  const auto padded = zero_pad(img);
  CHECK(padded.size() == 144);
  CHECK(crop_to_fov(padded, s2).pixels == img.pixels);
}
