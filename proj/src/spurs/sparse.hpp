#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spurs/grid.hpp"
#include "spurs/kernels.hpp"
#include "spurs/trajectory.hpp"

namespace spurs {

// Real sparse matrix in compressed sparse column layout. Row indices are
// strictly increasing within each column and no explicit zeros are stored.
struct SparseMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<std::size_t> colptr{0};
  std::vector<std::int32_t> rowind;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
  double max_abs() const;
  SparseMatrix transpose() const;
  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  void multiply(std::span<const cplx> x, std::span<cplx> y) const;
  // y = A^T x
  void multiply_transpose(std::span<const cplx> x, std::span<cplx> y) const;
};

// Builds a CSC matrix from (row, col, value) triplets; duplicates are summed
// and zeros dropped.
struct Triplet {
  std::int32_t row, col;
  double value;
};
SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

// Flat column index of a 2D (or 1D) logical grid node.
std::size_t grid_column(const GridSpec& grid, long n0, long n1 = 0);

// Phi[m, n] = q(kappa_m - k_n): row m is the footprint of sample m. Throws
// ValidationError for a sample whose footprint lies entirely off the grid.
SparseMatrix assemble_phi(const Trajectory& traj, const GridSpec& grid, const KernelSpec& kernel);

// [[I, diag(gbar) Phi], [Phi^T diag(gbar), -rho I]], unknowns ordered (r, c).
struct TableauSystem {
  SparseMatrix psi;
  std::vector<double> gamma_bar;
  double rho = 0;
  std::size_t m = 0;  // residual block size
  std::size_t l = 0;  // coefficient block size, L^dim
};

TableauSystem assemble_tableau(const SparseMatrix& phi, std::vector<double> gamma_bar, double rho);

// 1e-6 times the mean over rows of sum_n (gbar_m Phi[m, n])^2.
double default_rho(const SparseMatrix& phi, std::span<const double> gamma_bar);

}  // namespace spurs
