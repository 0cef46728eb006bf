#include "spurs/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "spurs/error.hpp"

namespace spurs {

namespace {

constexpr int kTaps = 11;
constexpr double kWindowSigma = 1.5;

void check_shapes(const ImageGrid& f, const ImageGrid& g) {
  if (f.pixels.size() != g.pixels.size() || f.spec.dim != g.spec.dim || f.spec.n != g.spec.n)
    throw ValidationError("images must have the same shape");
  if (f.pixels.empty()) throw ValidationError("images are empty");
}

std::vector<double> magnitudes(const ImageGrid& img) {
  std::vector<double> m(img.pixels.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(img.pixels[i]);
  return m;
}

std::array<double, kTaps> gaussian_taps() {
  std::array<double, kTaps> w{};
  double s = 0;
  for (int i = 0; i < kTaps; ++i) {
    const double x = i - kTaps / 2;
    w[static_cast<std::size_t>(i)] = std::exp(-x * x / (2 * kWindowSigma * kWindowSigma));
    s += w[static_cast<std::size_t>(i)];
  }
  for (auto& v : w) v /= s;
  return w;
}

// Valid-mode separable filtering of a rows x cols array.
std::vector<double> filter_valid(const std::vector<double>& a, std::size_t rows, std::size_t cols, bool two_d,
                                 const std::array<double, kTaps>& w) {
  const std::size_t oc = cols - kTaps + 1;
  std::vector<double> tmp(rows * oc, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < oc; ++c) {
      double s = 0;
      for (int t = 0; t < kTaps; ++t) s += w[static_cast<std::size_t>(t)] * a[r * cols + c + static_cast<std::size_t>(t)];
      tmp[r * oc + c] = s;
    }
  if (!two_d) return tmp;
  const std::size_t orr = rows - kTaps + 1;
  std::vector<double> out(orr * oc, 0.0);
  for (std::size_t r = 0; r < orr; ++r)
    for (std::size_t c = 0; c < oc; ++c) {
      double s = 0;
      for (int t = 0; t < kTaps; ++t) s += w[static_cast<std::size_t>(t)] * tmp[(r + static_cast<std::size_t>(t)) * oc + c];
      out[r * oc + c] = s;
    }
  return out;
}

}  // namespace

double snr_db(const ImageGrid& f, const ImageGrid& g) {
  check_shapes(f, g);
  double sig = 0, err = 0;
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    const double fv = std::abs(f.pixels[i]);
    const double e = std::abs(g.pixels[i]) - fv;
    sig += fv * fv;
    err += e * e;
  }
  if (err == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(sig / err);
}

SsimResult mssim(const ImageGrid& f, const ImageGrid& g, std::optional<double> dynamic_range) {
  check_shapes(f, g);
  const bool two_d = f.spec.dim == 2;
  const std::size_t rows = two_d ? f.spec.n : 1, cols = f.spec.n;
  if (cols < kTaps || (two_d && rows < kTaps))
    throw ValidationError("SSIM needs at least 11 pixels per dimension");
  const auto a = magnitudes(f), b = magnitudes(g);
  double range = 0;
  if (dynamic_range) {
    range = *dynamic_range;
  } else {
    const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    range = *hi - *lo;
  }
  if (!(range > 0)) range = 1.0;
  const double c1 = (0.01 * range) * (0.01 * range), c2 = (0.03 * range) * (0.03 * range);

  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto w = gaussian_taps();
  const auto mu_a = filter_valid(a, rows, cols, two_d, w), mu_b = filter_valid(b, rows, cols, two_d, w);
  const auto e_aa = filter_valid(aa, rows, cols, two_d, w), e_bb = filter_valid(bb, rows, cols, two_d, w);
  const auto e_ab = filter_valid(ab, rows, cols, two_d, w);

  SsimResult out;
  out.rows = two_d ? rows - kTaps + 1 : 1;
  out.cols = cols - kTaps + 1;
  out.map.resize(mu_a.size());
  double sum = 0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = e_aa[i] - ma * ma, vb = e_bb[i] - mb * mb, cov = e_ab[i] - ma * mb;
    const double v = ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    out.map[i] = v;
    sum += v;
  }
  out.mssim = sum / static_cast<double>(out.map.size());
  return out;
}

}  // namespace spurs
