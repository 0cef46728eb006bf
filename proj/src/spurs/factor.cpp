#include "spurs/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spurs/amd.hpp"
#include "spurs/error.hpp"
#include "spurs/io.hpp"

namespace spurs {

const char* ordering_name(Ordering o) {
  switch (o) {
    case Ordering::constrained_amd: return "constrained-amd";
    case Ordering::amd: return "amd";
    case Ordering::natural: return "natural";
  }
  return "?";
}

Ordering ordering_from_name(const std::string& name) {
  if (name == "constrained-amd") return Ordering::constrained_amd;
  if (name == "amd") return Ordering::amd;
  if (name == "natural") return Ordering::natural;
  throw ValidationError("unknown ordering '" + name + "'");
}

std::vector<double> equilibrate(const SparseMatrix& psi, int sweeps) {
  const std::size_t n = psi.cols;
  std::vector<double> s(n, 1.0), rmax(n);
  for (int it = 0; it < sweeps; ++it) {
    std::fill(rmax.begin(), rmax.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = psi.colptr[j]; p < psi.colptr[j + 1]; ++p) {
        const auto i = static_cast<std::size_t>(psi.rowind[p]);
        rmax[i] = std::max(rmax[i], std::abs(s[i] * psi.values[p] * s[j]));
      }
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (rmax[i] == 0) throw FactorizationError("tableau has an empty row");
      s[i] /= std::sqrt(rmax[i]);
      worst = std::max(worst, std::abs(rmax[i] - 1.0));
    }
    if (worst < 1e-3) break;
  }
  return s;
}

namespace {

std::vector<std::vector<std::int32_t>> pattern_adjacency(const SparseMatrix& a) {
  std::vector<std::vector<std::int32_t>> adj(a.cols);
  for (std::size_t j = 0; j < a.cols; ++j)
    for (std::size_t p = a.colptr[j]; p < a.colptr[j + 1]; ++p)
      if (static_cast<std::size_t>(a.rowind[p]) != j) adj[j].push_back(a.rowind[p]);
  return adj;
}

// Graph of the coefficient-block Schur complement: c_j ~ c_k when some
// sample row couples both.
std::vector<std::vector<std::int32_t>> normal_adjacency(const TableauSystem& t) {
  const SparseMatrix& a = t.psi;
  const std::size_t m = t.m, l = t.l;
  std::vector<std::vector<std::int32_t>> adj(l);
  std::vector<std::size_t> mark(l, static_cast<std::size_t>(-1));
  for (std::size_t j = 0; j < l; ++j) {
    auto& out = adj[j];
    mark[j] = j;
    const std::size_t col = m + j;
    for (std::size_t p = a.colptr[col]; p < a.colptr[col + 1]; ++p) {
      const auto r = static_cast<std::size_t>(a.rowind[p]);
      if (r >= m) continue;
      for (std::size_t q = a.colptr[r]; q < a.colptr[r + 1]; ++q) {
        const auto c = static_cast<std::size_t>(a.rowind[q]);
        if (c < m) continue;
        const std::size_t k = c - m;
        if (mark[k] != j) {
          mark[k] = j;
          out.push_back(static_cast<std::int32_t>(k));
        }
      }
    }
  }
  return adj;
}

std::vector<std::int32_t> choose_ordering(const TableauSystem& t, Ordering ordering) {
  const std::size_t n = t.psi.cols;
  std::vector<std::int32_t> perm(n);
  switch (ordering) {
    case Ordering::natural:
      std::iota(perm.begin(), perm.end(), 0);
      break;
    case Ordering::amd:
      perm = amd_order(pattern_adjacency(t.psi));
      break;
    case Ordering::constrained_amd: {
      // Residual unknowns first keeps every pivot away from zero: the r
      // pivots are the identity and the remaining block is -(rho I +
      // Phi^T Gamma Phi), negative definite.
      std::iota(perm.begin(), perm.begin() + static_cast<long>(t.m), 0);
      const auto inner = amd_order(normal_adjacency(t));
      for (std::size_t k = 0; k < t.l; ++k)
        perm[t.m + k] = static_cast<std::int32_t>(t.m) + inner[k];
      break;
    }
  }
  return perm;
}

}  // namespace

Factorization factorize(const TableauSystem& t, Ordering ordering) {
  const SparseMatrix& a = t.psi;
  const std::size_t n = a.cols;
  if (a.rows != n || n == 0) throw ValidationError("tableau must be square and nonempty");
  if (!(t.rho > 0)) throw ValidationError("rho must be positive");

  Factorization f;
  f.m_ = t.m;
  f.ordering_ = ordering;
  f.scale_ = equilibrate(a);
  f.perm_ = choose_ordering(t, ordering);
  std::vector<std::int32_t> pinv(n);
  for (std::size_t k = 0; k < n; ++k) pinv[static_cast<std::size_t>(f.perm_[k])] = static_cast<std::int32_t>(k);

  // Upper triangle of C = P S Psi S P^T in CSC.
  std::vector<std::size_t> cp(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      const auto i = static_cast<std::size_t>(a.rowind[p]);
      const auto pi = pinv[i], pj = pinv[j];
      if (pi <= pj) ++cp[static_cast<std::size_t>(pj) + 1];
    }
  for (std::size_t k = 0; k < n; ++k) cp[k + 1] += cp[k];
  std::vector<std::int32_t> ci(cp[n]);
  std::vector<double> cx(cp[n]);
  double cmax = 0;
  {
    std::vector<std::size_t> next(cp.begin(), cp.end() - 1);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
        const auto i = static_cast<std::size_t>(a.rowind[p]);
        const double v = f.scale_[i] * a.values[p] * f.scale_[j];
        cmax = std::max(cmax, std::abs(v));
        const auto pi = pinv[i], pj = pinv[j];
        if (pi > pj) continue;
        const std::size_t q = next[static_cast<std::size_t>(pj)]++;
        ci[q] = pi;
        cx[q] = v;
      }
  }

  // Elimination tree and column counts.
  std::vector<std::int32_t> parent(n), flag(n);
  std::vector<std::size_t> lnz(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    parent[k] = -1;
    flag[k] = static_cast<std::int32_t>(k);
    for (std::size_t p = cp[k]; p < cp[k + 1]; ++p) {
      auto i = static_cast<std::size_t>(ci[p]);
      while (i < k && flag[i] != static_cast<std::int32_t>(k)) {
        if (parent[i] == -1) parent[i] = static_cast<std::int32_t>(k);
        ++lnz[i];
        flag[i] = static_cast<std::int32_t>(k);
        i = static_cast<std::size_t>(parent[i]);
      }
    }
  }
  f.lp_.assign(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) f.lp_[k + 1] = f.lp_[k] + lnz[k];
  f.li_.resize(f.lp_[n]);
  f.lx_.resize(f.lp_[n]);
  f.d_.resize(n);

  // Up-looking numeric factorization, one row of L per step.
  const double tiny = 1e-13 * cmax;
  std::vector<double> y(n, 0.0);
  std::vector<std::int32_t> pattern(n), stack(n);
  std::fill(lnz.begin(), lnz.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t top = n;
    flag[k] = static_cast<std::int32_t>(k);
    for (std::size_t p = cp[k]; p < cp[k + 1]; ++p) {
      auto i = static_cast<std::size_t>(ci[p]);
      y[i] += cx[p];
      std::size_t len = 0;
      while (i < k && flag[i] != static_cast<std::int32_t>(k)) {
        stack[len++] = static_cast<std::int32_t>(i);
        flag[i] = static_cast<std::int32_t>(k);
        i = static_cast<std::size_t>(parent[i]);
      }
      while (len > 0) pattern[--top] = stack[--len];
    }
    double dk = y[k];
    y[k] = 0;
    for (; top < n; ++top) {
      const auto i = static_cast<std::size_t>(pattern[top]);
      const double yi = y[i];
      y[i] = 0;
      const std::size_t p0 = f.lp_[i], p1 = p0 + lnz[i];
      const std::int32_t* idx = f.li_.data();
      const double* val = f.lx_.data();
      for (std::size_t p = p0; p < p1; ++p) y[static_cast<std::size_t>(idx[p])] -= val[p] * yi;
      const double lki = yi / f.d_[i];
      dk -= lki * yi;
      f.li_[p1] = static_cast<std::int32_t>(k);
      f.lx_[p1] = lki;
      ++lnz[i];
    }
    if (!(std::abs(dk) >= tiny) || !std::isfinite(dk))
      throw FactorizationError("pivot " + std::to_string(k) + " is numerically zero (" +
                               std::to_string(dk) + ")");
    f.d_[k] = dk;
  }
  return f;
}

void Factorization::solve_real(double* x, double* work) const {
  const std::size_t n = d_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(perm_[k]);
    work[k] = scale_[i] * x[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double v = work[j];
    if (v == 0) continue;
    for (std::size_t p = lp_[j]; p < lp_[j + 1]; ++p) work[static_cast<std::size_t>(li_[p])] -= lx_[p] * v;
  }
  for (std::size_t j = 0; j < n; ++j) work[j] /= d_[j];
  for (std::size_t j = n; j-- > 0;) {
    double v = work[j];
    for (std::size_t p = lp_[j]; p < lp_[j + 1]; ++p) v -= lx_[p] * work[static_cast<std::size_t>(li_[p])];
    work[j] = v;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(perm_[k]);
    x[i] = scale_[i] * work[k];
  }
}

void Factorization::solve(std::span<double> rhs) const {
  if (rhs.size() != size()) throw ValidationError("solve: right-hand side has the wrong length");
  std::vector<double> work(size());
  solve_real(rhs.data(), work.data());
}

void Factorization::solve(std::span<cplx> rhs) const {
  if (rhs.size() != size()) throw ValidationError("solve: right-hand side has the wrong length");
  const std::size_t n = size();
  std::vector<double> re(n), im(n), work(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = rhs[i].real();
    im[i] = rhs[i].imag();
  }
  solve_real(re.data(), work.data());
  solve_real(im.data(), work.data());
  for (std::size_t i = 0; i < n; ++i) rhs[i] = {re[i], im[i]};
}

void Factorization::solve_refined(const SparseMatrix& psi, std::span<double> rhs, int steps) const {
  const std::size_t n = size();
  if (rhs.size() != n || psi.cols != n || psi.rows != n)
    throw ValidationError("solve: right-hand side has the wrong length");
  std::vector<double> b(rhs.begin(), rhs.end()), r(n), work(n);
  double bnorm = 0;
  for (double v : b) bnorm = std::max(bnorm, std::abs(v));
  solve_real(rhs.data(), work.data());
  for (int it = 0; it < steps && bnorm > 0; ++it) {
    psi.multiply(std::span<const double>(rhs.data(), n), r);
    double rnorm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = b[i] - r[i];
      rnorm = std::max(rnorm, std::abs(r[i]));
    }
    if (rnorm <= 1e-15 * bnorm) break;
    solve_real(r.data(), work.data());
    for (std::size_t i = 0; i < n; ++i) rhs[i] += r[i];
  }
}

void Factorization::solve_refined(const SparseMatrix& psi, std::span<cplx> rhs, int steps) const {
  const std::size_t n = size();
  if (rhs.size() != n) throw ValidationError("solve: right-hand side has the wrong length");
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = rhs[i].real();
    im[i] = rhs[i].imag();
  }
  solve_refined(psi, re, steps);
  solve_refined(psi, im, steps);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = {re[i], im[i]};
}

SparseMatrix Factorization::lower() const {
  const std::size_t n = size();
  SparseMatrix l;
  l.rows = l.cols = n;
  l.colptr.assign(n + 1, 0);
  l.rowind.reserve(li_.size() + n);
  l.values.reserve(li_.size() + n);
  for (std::size_t j = 0; j < n; ++j) {
    l.rowind.push_back(static_cast<std::int32_t>(j));
    l.values.push_back(1.0);
    for (std::size_t p = lp_[j]; p < lp_[j + 1]; ++p) {
      if (lx_[p] == 0) continue;
      l.rowind.push_back(li_[p]);
      l.values.push_back(lx_[p]);
    }
    l.colptr[j + 1] = l.values.size();
  }
  return l;
}

SparseMatrix Factorization::upper() const {
  // U = D L^T Ds^-1, Ds = diag(s[perm[k]]): U[k, j] = d_k L[j, k] / s_perm[j].
  SparseMatrix lt = lower().transpose();  // column j of L^T = row j of L
  for (std::size_t j = 0; j < lt.cols; ++j) {
    const double sj = scale_[static_cast<std::size_t>(perm_[j])];
    for (std::size_t p = lt.colptr[j]; p < lt.colptr[j + 1]; ++p)
      lt.values[p] *= d_[static_cast<std::size_t>(lt.rowind[p])] / sj;
  }
  return lt;
}

std::pair<double, double> Factorization::lu_residual(const SparseMatrix& psi) const {
  const std::size_t n = size();
  if (psi.rows != n || psi.cols != n) throw ValidationError("lu_residual: size mismatch");
  const SparseMatrix l = lower();
  const SparseMatrix u = upper();
  std::vector<std::int32_t> pinv(n);
  for (std::size_t k = 0; k < n; ++k) pinv[static_cast<std::size_t>(perm_[k])] = static_cast<std::int32_t>(k);
  std::vector<double> acc(n, 0.0);
  std::vector<char> touched(n, 0);
  std::vector<std::int32_t> list;
  double resid = 0, amax = 0;
  for (std::size_t j = 0; j < n; ++j) {
    list.clear();
    // Column j of L U.
    for (std::size_t p = u.colptr[j]; p < u.colptr[j + 1]; ++p) {
      const auto k = static_cast<std::size_t>(u.rowind[p]);
      const double ukj = u.values[p];
      for (std::size_t q = l.colptr[k]; q < l.colptr[k + 1]; ++q) {
        const auto i = static_cast<std::size_t>(l.rowind[q]);
        if (!touched[i]) {
          touched[i] = 1;
          list.push_back(static_cast<std::int32_t>(i));
        }
        acc[i] += l.values[q] * ukj;
      }
    }
    // Column j of P R^-1 Psi Q is column perm[j] of R^-1 Psi, rows permuted.
    const auto oj = static_cast<std::size_t>(perm_[j]);
    for (std::size_t p = psi.colptr[oj]; p < psi.colptr[oj + 1]; ++p) {
      const auto oi = static_cast<std::size_t>(psi.rowind[p]);
      const double v = scale_[oi] * psi.values[p];
      amax = std::max(amax, std::abs(v));
      const auto i = static_cast<std::size_t>(pinv[oi]);
      if (!touched[i]) {
        touched[i] = 1;
        list.push_back(static_cast<std::int32_t>(i));
      }
      acc[i] -= v;
    }
    for (auto i : list) {
      resid = std::max(resid, std::abs(acc[static_cast<std::size_t>(i)]));
      acc[static_cast<std::size_t>(i)] = 0;
      touched[static_cast<std::size_t>(i)] = 0;
    }
  }
  return {resid, amax};
}

void Factorization::write(BinaryWriter& w) const {
  w.str("LDLT");
  w.u64(m_);
  w.str(ordering_name(ordering_));
  w.u64s(std::vector<std::uint64_t>(perm_.begin(), perm_.end()));
  w.f64s(scale_);
  w.u64s(std::vector<std::uint64_t>(lp_.begin(), lp_.end()));
  w.u64s(std::vector<std::uint64_t>(li_.begin(), li_.end()));
  w.f64s(lx_);
  w.f64s(d_);
}

Factorization Factorization::read(BinaryReader& r) {
  if (r.str() != "LDLT") throw IoError("unsupported factorization block");
  Factorization f;
  f.m_ = r.u64();
  f.ordering_ = ordering_from_name(r.str());
  const auto perm = r.u64s();
  f.scale_ = r.f64s();
  const auto lp = r.u64s();
  const auto li = r.u64s();
  f.lx_ = r.f64s();
  f.d_ = r.f64s();
  const std::size_t n = f.d_.size();
  if (perm.size() != n || f.scale_.size() != n || lp.size() != n + 1 || lp.front() != 0 ||
      lp.back() != li.size() || f.lx_.size() != li.size() || f.m_ > n)
    throw IoError("factorization block is inconsistent");
  std::vector<char> seen(n, 0);
  f.perm_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (perm[k] >= n || seen[perm[k]]) throw IoError("factorization permutation is not a bijection");
    seen[perm[k]] = 1;
    f.perm_[k] = static_cast<std::int32_t>(perm[k]);
  }
  f.lp_.assign(lp.begin(), lp.end());
  f.li_.resize(li.size());
  for (std::size_t j = 0; j < n; ++j) {
    if (lp[j] > lp[j + 1]) throw IoError("factorization column pointers decrease");
    for (std::size_t p = lp[j]; p < lp[j + 1]; ++p) {
      if (li[p] <= j || li[p] >= n) throw IoError("factorization row index out of range");
      f.li_[p] = static_cast<std::int32_t>(li[p]);
    }
  }
  return f;
}

NnzReport nnz_report(const SparseMatrix& phi, const SparseMatrix& psi, const Factorization& f) {
  NnzReport r;
  r.nnz_phi = phi.nnz();
  r.nnz_psi = psi.nnz();
  r.nnz_lu = f.nnz_lu();
  r.fill_ratio = r.nnz_psi ? static_cast<double>(r.nnz_lu) / static_cast<double>(r.nnz_psi) : 0.0;
  return r;
}

}  // namespace spurs
