#include "spurs/gridding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spurs/bessel.hpp"
#include "spurs/error.hpp"

namespace spurs {

KaiserBesselSpec KaiserBesselSpec::make(double width, double sigma) {
  if (!(width >= 2)) throw ValidationError("Kaiser-Bessel width must be >= 2");
  if (!(sigma >= 1)) throw ValidationError("gridding oversampling must be >= 1");
  KaiserBesselSpec s;
  s.width = width;
  s.sigma = sigma;
  const double a = (width / sigma) * (sigma - 0.5);
  const double arg = a * a - 0.8;
  if (!(arg > 0)) throw ValidationError("Kaiser-Bessel shape parameter would be non-positive");
  s.beta = std::numbers::pi * std::sqrt(arg);
  return s;
}

double kb_eval(const KaiserBesselSpec& spec, double t) {
  const double r = 2.0 * t / spec.width;
  if (std::abs(r) > 1.0) return 0.0;
  return bessel_i0(spec.beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / bessel_i0(spec.beta);
}

double kb_transform(const KaiserBesselSpec& spec, double nu) {
  const double w = spec.width;
  const double z2 = spec.beta * spec.beta - std::pow(std::numbers::pi * w * nu, 2);
  double ratio;
  if (z2 > 1e-12) {
    const double z = std::sqrt(z2);
    ratio = std::sinh(z) / z;
  } else if (z2 < -1e-12) {
    const double z = std::sqrt(-z2);
    ratio = std::sin(z) / z;
  } else {
    ratio = 1.0;
  }
  return w * ratio / bessel_i0(spec.beta);
}

DensityKind density_kind_from_name(const std::string& name) {
  if (name == "radial") return DensityKind::radial;
  if (name == "uniform") return DensityKind::uniform;
  throw ValidationError("unknown density weight kind '" + name + "'");
}

const char* density_kind_name(DensityKind kind) { return kind == DensityKind::radial ? "radial" : "uniform"; }

std::vector<double> density_weights(const Trajectory& traj, DensityKind kind) {
  const std::size_t m = traj.size();
  std::vector<double> w(m, 1.0);
  if (kind == DensityKind::uniform) return w;
  double dr = INFINITY;
  for (std::size_t i = 0; i < m; ++i) {
    double r2 = 0;
    for (double v : traj.point(i)) r2 += v * v;
    w[i] = std::sqrt(r2);
    if (w[i] > 0) dr = std::min(dr, w[i]);
  }
  if (!std::isfinite(dr)) return std::vector<double>(m, 1.0);  // every sample at the origin
  double sum = 0;
  for (auto& v : w) {
    if (v == 0) v = 0.25 * dr;
    sum += v;
  }
  const double scale = static_cast<double>(m) / sum;
  for (auto& v : w) v *= scale;
  return w;
}

ImageGrid grid_reconstruct(const Trajectory& traj, std::span<const cplx> b, std::size_t n,
                           const KaiserBesselSpec& spec, std::span<const double> weights) {
  if (b.size() != traj.size()) throw ValidationError("sample count does not match the trajectory");
  if (!weights.empty() && weights.size() != traj.size()) throw ValidationError("weight count mismatch");
  const GridSpec grid = GridSpec::make(traj.dim(), n, spec.sigma);
  const int dim = grid.dim;
  const long l = static_cast<long>(grid.size);
  const long half = l / 2;
  const double sigma = grid.sigma();
  const double hw = 0.5 * spec.width;

  double rmax = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    double r2 = 0;
    for (double v : traj.point(i)) r2 += v * v;
    rmax = std::max(rmax, std::sqrt(r2));
  }
  double area = dim == 2 ? std::numbers::pi * rmax * rmax : 2.0 * rmax;
  if (area == 0) area = 1.0;
  const double cell = area / static_cast<double>(traj.size());

  // Spread sequentially so sums are independent of the thread count.
  std::vector<cplx> g(grid.total(), cplx{});
  std::vector<std::pair<long, double>> taps[2];
  for (std::size_t m = 0; m < traj.size(); ++m) {
    auto k = traj.point(m);
    for (int d = 0; d < dim; ++d) {
      taps[d].clear();
      const double u = k[d] * sigma;
      const long first = static_cast<long>(std::ceil(u - hw)), last = static_cast<long>(std::floor(u + hw));
      for (long node = first; node <= last; ++node) {
        const double v = kb_eval(spec, u - static_cast<double>(node));
        if (v == 0) continue;
        const long wrapped = ((node + half) % l + l) % l;
        taps[d].push_back({wrapped, v});
      }
    }
    const cplx val = b[m] * (weights.empty() ? 1.0 : weights[m]) * cell;
    if (dim == 1) {
      for (const auto& [i, v] : taps[0]) g[static_cast<std::size_t>(i)] += val * v;
    } else {
      for (const auto& [i, vi] : taps[0]) {
        const cplx vv = val * vi;
        cplx* row = g.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(l);
        for (const auto& [j, vj] : taps[1]) row[static_cast<std::size_t>(j)] += vv * vj;
      }
    }
  }

  std::vector<cplx> img = inverse_dft(ComplexGrid{grid, std::move(g)});
  ImageGrid out = crop_to_fov(img, grid);
  // Per-dimension deapodization (1/sigma) K^(x / L) at pixel x = -N/2..N/2-1.
  const long nh = static_cast<long>(n / 2);
  std::vector<double> deapod(n);
  for (long i = 0; i < static_cast<long>(n); ++i) {
    const double v = kb_transform(spec, static_cast<double>(i - nh) / static_cast<double>(l)) / sigma;
    if (std::abs(v) < 1e-8) throw NumericalError("deapodization vanishes inside the field of view");
    deapod[static_cast<std::size_t>(i)] = v;
  }
  const double scale = dim == 1 ? static_cast<double>(n) : static_cast<double>(n) * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (dim == 1) {
      out.pixels[i] *= scale / deapod[i];
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) out.pixels[i * n + j] *= scale / (deapod[i] * deapod[j]);
  }
  return out;
}

}  // namespace spurs
