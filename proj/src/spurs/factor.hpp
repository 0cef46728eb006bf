#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spurs/sparse.hpp"

namespace spurs {

enum class Ordering {
  constrained_amd,  // residual block first, AMD on the normal-equation graph
  amd,              // AMD on the full tableau pattern
  natural,
};

const char* ordering_name(Ordering o);
Ordering ordering_from_name(const std::string& name);

// Static-pivot LDL^T of the symmetrically equilibrated tableau,
//   P (S Psi S) P^T = L D L^T,
// exposed as P (R^-1 Psi) Q = L U with R = S^-1, Q = P^T and
// U = D L^T (P S P^T)^-1. L is unit lower triangular.
class Factorization {
 public:
  Factorization() = default;

  std::size_t size() const { return d_.size(); }
  std::size_t m() const { return m_; }
  Ordering ordering() const { return ordering_; }

  // Psi z = rhs. Complex right-hand sides are solved as two real solves.
  void solve(std::span<double> rhs) const;
  void solve(std::span<cplx> rhs) const;
  // Same, followed by up to `steps` rounds of iterative refinement against
  // the unscaled tableau.
  void solve_refined(const SparseMatrix& psi, std::span<double> rhs, int steps = 2) const;
  void solve_refined(const SparseMatrix& psi, std::span<cplx> rhs, int steps = 2) const;

  // perm[k] = original index of pivot k.
  const std::vector<std::int32_t>& perm() const { return perm_; }
  // Diagonal of R^-1 (the symmetric equilibration S).
  const std::vector<double>& scale() const { return scale_; }
  const std::vector<double>& pivots() const { return d_; }
  std::size_t nnz_l_strict() const { return li_.size(); }
  std::size_t nnz_lu() const { return 2 * li_.size() + d_.size(); }

  // Explicit triangular factors of the LU view.
  SparseMatrix lower() const;
  SparseMatrix upper() const;
  // max |P R^-1 Psi Q - L U| and max |R^-1 Psi|.
  std::pair<double, double> lu_residual(const SparseMatrix& psi) const;

  void write(class BinaryWriter& w) const;
  static Factorization read(class BinaryReader& r);

  friend Factorization factorize(const TableauSystem& t, Ordering ordering);

 private:
  void solve_real(double* x, double* work) const;

  std::size_t m_ = 0;
  Ordering ordering_ = Ordering::constrained_amd;
  std::vector<std::int32_t> perm_;
  std::vector<double> scale_;
  std::vector<std::size_t> lp_;
  std::vector<std::int32_t> li_;
  std::vector<double> lx_;
  std::vector<double> d_;
};

// Throws FactorizationError when a pivot falls below 1e-13 max|S Psi S|.
Factorization factorize(const TableauSystem& t, Ordering ordering = Ordering::constrained_amd);

// Symmetric equilibration S with max_j |s_i Psi_ij s_j| close to 1 per row.
std::vector<double> equilibrate(const SparseMatrix& psi, int sweeps = 8);

struct NnzReport {
  std::size_t nnz_phi = 0;
  std::size_t nnz_psi = 0;
  std::size_t nnz_lu = 0;
  double fill_ratio = 0;
};

NnzReport nnz_report(const SparseMatrix& phi, const SparseMatrix& psi, const Factorization& f);

}  // namespace spurs
