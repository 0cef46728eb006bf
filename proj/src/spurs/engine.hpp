#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spurs/factor.hpp"
#include "spurs/grid.hpp"
#include "spurs/kernels.hpp"
#include "spurs/sparse.hpp"
#include "spurs/trajectory.hpp"

namespace spurs {

struct ReconConfig {
  std::size_t n = 0;      // base grid points per dimension
  int degree = 3;         // B-spline degree p
  double sigma = 2.0;     // grid oversampling
  double rho = 0.0;       // <= 0 selects default_rho
  std::vector<double> gamma_bar;  // empty means identity weights
  int max_iter = 15;
  double tol = 1e-6;      // stop when |eps| / |b| <= tol
  Ordering ordering = Ordering::constrained_amd;

  void validate() const;
};

// Per-dimension LSI correction, length L = sigma N, centered:
// H[n] = sinc^(p+1)(n / L) for |n| < N/2 and 0 elsewhere; with sigma = 1
// the whole range [-N/2, N/2) is kept.
std::vector<double> lsi_filter(int degree, const GridSpec& grid);

// Multiplies an L^dim image by the tensor product of the 1D filter.
void apply_filter(std::span<cplx> image, const GridSpec& grid, std::span<const double> h);

// Everything the offline phase produces; immutable and shareable.
struct OfflinePlan {
  GridSpec grid;
  KernelSpec kernel;
  double rho = 0;
  Trajectory trajectory;
  TableauSystem tableau;
  Factorization factor;
  std::vector<double> filter;
  std::string trajectory_hash;
  std::size_t nnz_phi = 0;

  std::size_t m() const { return tableau.m; }
  NnzReport nnz() const;
};

OfflinePlan plan_offline(const Trajectory& traj, const ReconConfig& config);

// Plan container: magic "SPURSFAC1", metadata, tableau, factors, filter and
// a trailing checksum that load_plan verifies.
void save_plan(const OfflinePlan& plan, const std::string& path);
OfflinePlan load_plan(const std::string& path);

struct Reconstruction {
  ComplexGrid d;   // filtered coefficients on the L^dim grid
  ImageGrid image; // N^dim image in the phantom's amplitude units
};

Reconstruction reconstruct_once(const OfflinePlan& plan, std::span<const cplx> b);

// b~[m] = sum_n d[n] prod_d sinc(kappa_d sigma - n_d).
std::vector<cplx> resample_nonuniform(const ComplexGrid& d, const Trajectory& traj);

// alpha = (v^H eps) / |v|^2, the minimizer of |eps - alpha v|. Throws
// NumericalError when v = 0.
cplx optimal_step(std::span<const cplx> eps, std::span<const cplx> v);

struct IterationRecord {
  int iteration = 0;       // 0 for d_0 = G b
  double error_norm = 0;   // |eps_p|
  cplx alpha{};            // step taken after this iterate (0 for the last)
};

struct IterativeResult {
  Reconstruction result;
  std::vector<IterationRecord> history;
  bool converged = false;
};

IterativeResult reconstruct_iterative(const OfflinePlan& plan, std::span<const cplx> b,
                                      int max_iter, double tol);

}  // namespace spurs
