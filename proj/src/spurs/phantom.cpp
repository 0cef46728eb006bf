#include "spurs/phantom.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "spurs/bessel.hpp"
#include "spurs/error.hpp"
#include "spurs/io.hpp"
#include "spurs/log.hpp"
#include "spurs/parallel.hpp"

namespace spurs {

namespace {

constexpr double kPi = std::numbers::pi;

struct Row {
  double amplitude, a, b, x0, y0, degrees;
};

// Semi-axes and centers in the [-1, 1] convention; halved on load.
constexpr Row kSheppLogan[10] = {
    {2.00, 0.69, 0.92, 0.00, 0.0000, 0},     {-0.98, 0.6624, 0.874, 0.00, -0.0184, 0},
    {-0.02, 0.11, 0.31, 0.22, 0.0000, -18},  {-0.02, 0.16, 0.41, -0.22, 0.0000, 18},
    {0.01, 0.21, 0.25, 0.00, 0.3500, 0},     {0.01, 0.046, 0.046, 0.00, 0.1000, 0},
    {0.01, 0.046, 0.046, 0.00, -0.1000, 0},  {0.01, 0.046, 0.023, -0.08, -0.6050, 0},
    {0.01, 0.023, 0.023, 0.00, -0.6060, 0},  {0.01, 0.023, 0.046, 0.06, -0.6050, 0},
};

constexpr double kModifiedAmplitudes[10] = {1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};

Phantom from_rows(const double* amplitudes) {
  Phantom ph;
  for (int i = 0; i < 10; ++i) {
    const Row& r = kSheppLogan[i];
    ph.ellipses.push_back({amplitudes ? amplitudes[i] : r.amplitude, 0.5 * r.x0, 0.5 * r.y0,
                           0.5 * r.a, 0.5 * r.b, r.degrees * kPi / 180.0});
  }
  return ph;
}

void check_phantom(const Phantom& ph) {
  if (ph.ellipses.empty()) throw ValidationError("phantom has no ellipses");
  for (const auto& e : ph.ellipses) {
    if (!(e.a > 0) || !(e.b > 0)) throw ValidationError("ellipse semi-axes must be positive");
    const double reach = std::max(e.a, e.b);
    if (std::abs(e.x0) + reach > 0.5 || std::abs(e.y0) + reach > 0.5)
      log_message(LogLevel::warn, "ellipse may extend beyond the field of view");
  }
}

// A a b J1(2 pi r) / r, continuous at r = 0 where it equals A pi a b.
double ellipse_ft_magnitude(const Ellipse& e, double kx, double ky) {
  const double c = std::cos(e.theta), s = std::sin(e.theta);
  const double kxr = c * kx + s * ky;
  const double kyr = -s * kx + c * ky;
  const double r = std::hypot(e.a * kxr, e.b * kyr);
  const double scale = e.amplitude * e.a * e.b;
  if (r < 1e-8) {
    const double z = kPi * r;  // J1(2 pi r)/r ~ pi (1 - (pi r)^2 / 2)
    return scale * kPi * (1.0 - 0.5 * z * z);
  }
  return scale * bessel_j1(2.0 * kPi * r) / r;
}

// Uniform double in [0, 1) from the top 53 bits; identical on every platform
// unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Phantom shepp_logan() { return from_rows(nullptr); }
Phantom modified_shepp_logan() { return from_rows(kModifiedAmplitudes); }

Phantom phantom_by_name(const std::string& name) {
  if (name == "shepp-logan") return shepp_logan();
  if (name == "modified-shepp-logan") return modified_shepp_logan();
  throw ValidationError("unknown phantom '" + name + "'");
}

SampleSet phantom_kspace(const Phantom& ph, const Trajectory& traj) {
  if (traj.dim() != 2) throw ValidationError("phantom k-space needs a 2D trajectory");
  check_phantom(ph);
  SampleSet out;
  out.trajectory_hash = traj.hash();
  out.b.resize(traj.size());
  parallel_for(
      traj.size(),
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t m = lo; m < hi; ++m) {
          auto k = traj.point(m);
          cplx acc = 0;
          for (const auto& e : ph.ellipses) {
            const double phase = -2.0 * kPi * (k[0] * e.x0 + k[1] * e.y0);
            acc += ellipse_ft_magnitude(e, k[0], k[1]) * std::polar(1.0, phase);
          }
          out.b[m] = acc;
        }
      },
      256);
  return out;
}

ImageGrid phantom_image(const Phantom& ph, std::size_t n) {
  check_phantom(ph);
  ImageGrid img;
  img.spec = GridSpec::make(2, n, 1.0);
  img.pixels.assign(n * n, 0.0);
  const long half = static_cast<long>(n / 2);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(static_cast<long>(i) - half) * inv_n;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = static_cast<double>(static_cast<long>(j) - half) * inv_n;
      double v = 0;
      for (const auto& e : ph.ellipses) {
        const double c = std::cos(e.theta), s = std::sin(e.theta);
        const double dx = x - e.x0, dy = y - e.y0;
        const double u = (c * dx + s * dy) / e.a;
        const double w = (-s * dx + c * dy) / e.b;
        if (u * u + w * w <= 1.0) v += e.amplitude;
      }
      img.pixels[i * n + j] = v;
    }
  }
  return img;
}

SampleSet add_noise(const SampleSet& s, double isnr_db, std::uint64_t seed) {
  if (s.b.empty()) throw ValidationError("cannot add noise to an empty sample set");
  if (std::isnan(isnr_db)) throw ValidationError("isnr_db must not be NaN");
  SampleSet out = s;
  out.seed = seed;
  if (std::isinf(isnr_db) && isnr_db > 0) {
    out.isnr_db.reset();
    return out;
  }
  if (std::isinf(isnr_db)) throw ValidationError("isnr_db must be finite or +inf");
  double power = 0;
  for (const auto& v : s.b) power += std::norm(v);
  power /= static_cast<double>(s.b.size());
  const double sigma = std::sqrt(power / (2.0 * std::pow(10.0, isnr_db / 10.0)));
  std::mt19937_64 rng(seed);
  for (auto& v : out.b) {
    // Box-Muller: one pair of uniforms gives the real and imaginary parts.
    const double u1 = 1.0 - unit_uniform(rng);  // (0, 1]
    const double u2 = unit_uniform(rng);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    v += sigma * cplx(rad * std::cos(2.0 * kPi * u2), rad * std::sin(2.0 * kPi * u2));
  }
  out.isnr_db = isnr_db;
  return out;
}

void save_samples(const SampleSet& s, const std::string& path) {
  RawArray arr;
  arr.dtype = RawArray::DType::c128;
  arr.shape = {s.b.size()};
  arr.center_offset = {0};
  arr.cplx_values = s.b;
  arr.extra["trajectory_hash"] = s.trajectory_hash;
  arr.extra["isnr_db"] = s.isnr_db ? nlohmann::json(*s.isnr_db) : nlohmann::json(nullptr);
  arr.extra["seed"] = s.seed ? nlohmann::json(*s.seed) : nlohmann::json(nullptr);
  write_raw(path, arr);
}

SampleSet load_samples(const std::string& path) {
  RawArray arr = read_raw(path);
  if (arr.dtype != RawArray::DType::c128 || arr.shape.size() != 1)
    throw IoError(path + ": samples must be a 1D c128 array");
  SampleSet s;
  s.b = std::move(arr.cplx_values);
  try {
    s.trajectory_hash = arr.extra.value("trajectory_hash", std::string{});
    if (arr.extra.contains("isnr_db") && !arr.extra["isnr_db"].is_null())
      s.isnr_db = arr.extra["isnr_db"].get<double>();
    if (arr.extra.contains("seed") && !arr.extra["seed"].is_null())
      s.seed = arr.extra["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ".json: " + e.what());
  }
  return s;
}

}  // namespace spurs
