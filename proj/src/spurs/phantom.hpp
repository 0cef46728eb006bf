#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spurs/grid.hpp"
#include "spurs/trajectory.hpp"

namespace spurs {

// Constant-intensity ellipse; all lengths in FOV units, theta in radians.
struct Ellipse {
  double amplitude = 1.0;
  double x0 = 0.0, y0 = 0.0;
  double a = 0.25, b = 0.25;
  double theta = 0.0;
};

struct Phantom {
  std::vector<Ellipse> ellipses;
};

// Ten-ellipse Shepp-Logan head (1974 intensities), scaled to the unit FOV.
Phantom shepp_logan();
// Same geometry with the higher-contrast intensities common in imaging toolkits.
Phantom modified_shepp_logan();
// Looks a phantom up by CLI name ("shepp-logan", "modified-shepp-logan").
Phantom phantom_by_name(const std::string& name);

// Measured k-space samples b[m] = f^(kappa_m), with noise metadata.
struct SampleSet {
  std::string trajectory_hash;
  std::vector<cplx> b;
  std::optional<double> isnr_db;
  std::optional<std::uint64_t> seed;
};

// Exact Fourier transform of the phantom at each trajectory point (2D only).
SampleSet phantom_kspace(const Phantom& ph, const Trajectory& traj);

// Center-point rasterization on the N x N pixel grid x_n = n / N.
ImageGrid phantom_image(const Phantom& ph, std::size_t n);

// Adds complex white Gaussian noise with 10 log10(mean|b|^2 / (2 sigma^2)) =
// isnr_db. An infinite isnr_db returns the samples unchanged.
SampleSet add_noise(const SampleSet& s, double isnr_db, std::uint64_t seed);

// Sample sets on disk: raw c128 array of shape [M] plus sidecar fields
// trajectory_hash, isnr_db (null when noiseless) and seed.
void save_samples(const SampleSet& s, const std::string& path);
SampleSet load_samples(const std::string& path);

}  // namespace spurs
