#pragma once

#include <span>
#include <string>
#include <vector>

#include "spurs/grid.hpp"
#include "spurs/trajectory.hpp"

namespace spurs {

struct KaiserBesselSpec {
  double width = 12.0;  // support W in oversampled-grid units
  double beta = 0.0;
  double sigma = 2.0;

  // beta = pi sqrt((W/sigma)^2 (sigma - 1/2)^2 - 0.8)
  static KaiserBesselSpec make(double width = 12.0, double sigma = 2.0);
};

// I0(beta sqrt(1 - (2t/W)^2)) / I0(beta) on |t| <= W/2, zero outside.
double kb_eval(const KaiserBesselSpec& spec, double t);

// Continuous Fourier transform of kb_eval at frequency nu (cycles per grid unit).
double kb_transform(const KaiserBesselSpec& spec, double nu);

enum class DensityKind { radial, uniform };
DensityKind density_kind_from_name(const std::string& name);
const char* density_kind_name(DensityKind kind);

// Radial: w ~ |kappa|, samples at the origin get delta_r / 4 (the share of a
// disk of radius delta_r / 2), delta_r the smallest nonzero radius. Uniform:
// ones. Normalized to mean 1.
std::vector<double> density_weights(const Trajectory& traj, DensityKind kind);

// Four-step gridding: density compensation, Kaiser-Bessel spreading onto the
// sigma-oversampled grid (periodic wrap), inverse DFT, deapodization; cropped
// to the N^dim FOV in the phantom's amplitude units.
ImageGrid grid_reconstruct(const Trajectory& traj, std::span<const cplx> b, std::size_t n,
                           const KaiserBesselSpec& spec, std::span<const double> weights);

}  // namespace spurs
