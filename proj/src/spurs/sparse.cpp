#include "spurs/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "spurs/error.hpp"
#include "spurs/parallel.hpp"

namespace spurs {

double SparseMatrix::max_abs() const {
  double m = 0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.colptr.assign(rows + 1, 0);
  for (auto r : rowind) ++t.colptr[static_cast<std::size_t>(r) + 1];
  for (std::size_t i = 0; i < rows; ++i) t.colptr[i + 1] += t.colptr[i];
  t.rowind.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::size_t> next(t.colptr.begin(), t.colptr.end() - 1);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t p = colptr[j]; p < colptr[j + 1]; ++p) {
      const std::size_t q = next[static_cast<std::size_t>(rowind[p])]++;
      t.rowind[q] = static_cast<std::int32_t>(j);
      t.values[q] = values[p];
    }
  }
  return t;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols || y.size() != rows) throw ValidationError("sparse multiply: size mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t p = colptr[j]; p < colptr[j + 1]; ++p) y[static_cast<std::size_t>(rowind[p])] += values[p] * x[j];
}

void SparseMatrix::multiply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != cols || y.size() != rows) throw ValidationError("sparse multiply: size mismatch");
  std::fill(y.begin(), y.end(), cplx{});
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t p = colptr[j]; p < colptr[j + 1]; ++p) y[static_cast<std::size_t>(rowind[p])] += values[p] * x[j];
}

void SparseMatrix::multiply_transpose(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != rows || y.size() != cols) throw ValidationError("sparse multiply: size mismatch");
  for (std::size_t j = 0; j < cols; ++j) {
    cplx acc = 0;
    for (std::size_t p = colptr[j]; p < colptr[j + 1]; ++p) acc += values[p] * x[static_cast<std::size_t>(rowind[p])];
    y[j] = acc;
  }
}

SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  SparseMatrix a;
  a.rows = rows;
  a.cols = cols;
  a.colptr.assign(cols + 1, 0);
  for (std::size_t k = 0; k < entries.size();) {
    const Triplet& t = entries[k];
    if (t.row < 0 || static_cast<std::size_t>(t.row) >= rows || t.col < 0 ||
        static_cast<std::size_t>(t.col) >= cols)
      throw ValidationError("triplet index out of range");
    double v = 0;
    std::size_t e = k;
    while (e < entries.size() && entries[e].row == t.row && entries[e].col == t.col) v += entries[e++].value;
    if (v != 0.0) {
      a.rowind.push_back(t.row);
      a.values.push_back(v);
      ++a.colptr[static_cast<std::size_t>(t.col) + 1];
    }
    k = e;
  }
  for (std::size_t j = 0; j < cols; ++j) a.colptr[j + 1] += a.colptr[j];
  return a;
}

std::size_t grid_column(const GridSpec& grid, long n0, long n1) {
  const long h = static_cast<long>(grid.half());
  const auto i0 = static_cast<std::size_t>(n0 + h);
  if (grid.dim == 1) return i0;
  return i0 * grid.size + static_cast<std::size_t>(n1 + h);
}

SparseMatrix assemble_phi(const Trajectory& traj, const GridSpec& grid, const KernelSpec& kernel) {
  if (traj.dim() != grid.dim) throw ValidationError("trajectory and grid dimensions differ");
  const std::size_t m = traj.size();
  // Row-wise CSR first (one footprint per sample), then transpose to CSC.
  std::vector<Footprint> fps(m);
  parallel_for(
      m,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) fps[i] = footprint(traj.point(i), grid, kernel);
      },
      1024);
  SparseMatrix csr;  // stored as the transpose: columns are samples
  csr.rows = grid.total();
  csr.cols = m;
  csr.colptr.assign(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (fps[i].empty())
      throw ValidationError("sample " + std::to_string(i) + " has no kernel support on the grid");
    csr.colptr[i + 1] = csr.colptr[i] + fps[i].count();
  }
  csr.rowind.resize(csr.colptr[m]);
  csr.values.resize(csr.colptr[m]);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t q = csr.colptr[i];
    const auto& fp = fps[i];
    if (grid.dim == 1) {
      for (const auto& t : fp.taps[0]) {
        csr.rowind[q] = static_cast<std::int32_t>(grid_column(grid, t.index));
        csr.values[q++] = t.weight;
      }
    } else {
      // Taps are ascending per dimension, so row-major columns come out sorted.
      for (const auto& t0 : fp.taps[0])
        for (const auto& t1 : fp.taps[1]) {
          csr.rowind[q] = static_cast<std::int32_t>(grid_column(grid, t0.index, t1.index));
          csr.values[q++] = t0.weight * t1.weight;
        }
    }
  }
  return csr.transpose();
}

TableauSystem assemble_tableau(const SparseMatrix& phi, std::vector<double> gamma_bar, double rho) {
  const std::size_t m = phi.rows, l = phi.cols;
  if (gamma_bar.empty()) gamma_bar.assign(m, 1.0);
  if (gamma_bar.size() != m) throw ValidationError("weight vector length must equal the sample count");
  for (double g : gamma_bar)
    if (!(g > 0) || !std::isfinite(g)) throw ValidationError("weights must be positive and finite");
  if (!(rho > 0) || !std::isfinite(rho)) throw ValidationError("rho must be positive and finite");

  const SparseMatrix phit = phi.transpose();  // columns are samples
  TableauSystem t;
  t.m = m;
  t.l = l;
  t.rho = rho;
  SparseMatrix& a = t.psi;
  a.rows = a.cols = m + l;
  a.colptr.assign(m + l + 1, 0);
  a.rowind.reserve(2 * phi.nnz() + m + l);
  a.values.reserve(2 * phi.nnz() + m + l);
  // Column i < m: identity entry then gbar_i Phi[i, :] shifted by m.
  for (std::size_t i = 0; i < m; ++i) {
    a.rowind.push_back(static_cast<std::int32_t>(i));
    a.values.push_back(1.0);
    for (std::size_t p = phit.colptr[i]; p < phit.colptr[i + 1]; ++p) {
      a.rowind.push_back(static_cast<std::int32_t>(m + static_cast<std::size_t>(phit.rowind[p])));
      a.values.push_back(gamma_bar[i] * phit.values[p]);
    }
    a.colptr[i + 1] = a.values.size();
  }
  // Column m + j: gbar Phi[:, j] then -rho on the diagonal.
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t p = phi.colptr[j]; p < phi.colptr[j + 1]; ++p) {
      const auto r = static_cast<std::size_t>(phi.rowind[p]);
      a.rowind.push_back(static_cast<std::int32_t>(r));
      a.values.push_back(gamma_bar[r] * phi.values[p]);
    }
    a.rowind.push_back(static_cast<std::int32_t>(m + j));
    a.values.push_back(-rho);
    a.colptr[m + j + 1] = a.values.size();
  }
  t.gamma_bar = std::move(gamma_bar);
  return t;
}

double default_rho(const SparseMatrix& phi, std::span<const double> gamma_bar) {
  if (phi.rows == 0) throw ValidationError("empty sampling matrix");
  double total = 0;
  for (std::size_t j = 0; j < phi.cols; ++j)
    for (std::size_t p = phi.colptr[j]; p < phi.colptr[j + 1]; ++p) {
      const double g = gamma_bar.empty() ? 1.0 : gamma_bar[static_cast<std::size_t>(phi.rowind[p])];
      total += (g * phi.values[p]) * (g * phi.values[p]);
    }
  return 1e-6 * total / static_cast<double>(phi.rows);
}

}  // namespace spurs
