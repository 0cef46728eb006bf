#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace spurs {

// Non-Cartesian sample coordinates kappa_m in k-space units of 1/FOV,
// stored point-major: point m occupies points[m*dim .. m*dim+dim).
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(int dim, std::vector<double> points, std::string label = {});

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : points_.size() / static_cast<std::size_t>(dim_); }
  std::span<const double> point(std::size_t m) const {
    return {points_.data() + m * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& points() const { return points_; }
  const std::string& label() const { return label_; }

  // FNV-1a 64 over dim and the raw coordinate bytes; identifies the sampling
  // pattern in plan and sample-set sidecars.
  std::string hash() const;

 private:
  int dim_ = 0;
  std::vector<double> points_;
  std::string label_;
};

// kappa_{r,s} = N (r/bins - 0.5) (cos w_s, sin w_s), w_s = pi s / spokes.
Trajectory radial(std::size_t n, std::size_t spokes, std::size_t bins);

// Single-arm Archimedean spiral: kappa_j = (N/2) sqrt(j/M) (cos w_j, sin w_j),
// w_j = 2 pi sqrt(j / pi).
Trajectory spiral(std::size_t n, std::size_t m);

// Largest distance from a probe point to its nearest sample, probes spaced
// 1/4 over [-N/2, N/2]^dim (inclusive).
double covering_radius(const Trajectory& traj, std::size_t extent);

// CSV with header "kx[,ky]" and 17 significant digits, or the raw float64
// array format when the path ends in ".raw" (shape [M, dim]).
void save_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

}  // namespace spurs
