#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "spurs/amd.hpp"
#include "spurs/error.hpp"
#include "spurs/factor.hpp"
#include "spurs/sparse.hpp"
#include "unit/support.hpp"

using namespace spurs;

namespace {

using Dense = std::vector<std::vector<double>>;

Dense to_dense(const SparseMatrix& a) {
  Dense d(a.rows, std::vector<double>(a.cols, 0.0));
  for (std::size_t j = 0; j < a.cols; ++j)
    for (std::size_t p = a.colptr[j]; p < a.colptr[j + 1]; ++p) d[static_cast<std::size_t>(a.rowind[p])][j] = a.values[p];
  return d;
}

TableauSystem random_1d(std::size_t n, std::size_t m, int degree, double sigma, std::uint64_t seed, double rho = 1e-6) {
  const auto grid = GridSpec::make(1, n, sigma);
  const Trajectory t(1, test::uniform(m, -double(n) / 2, double(n) / 2, seed));
  const auto phi = assemble_phi(t, grid, KernelSpec::make(degree));
  return assemble_tableau(phi, {}, rho);
}

// max |P S Psi P^T - L U| from dense products, independent of lu_residual.
double dense_lu_error(const TableauSystem& t, const Factorization& f, double* scale_out) {
  const auto psi = to_dense(t.psi);
  const auto l = to_dense(f.lower());
  const auto u = to_dense(f.upper());
  const auto& perm = f.perm();
  const auto& s = f.scale();
  const std::size_t n = psi.size();
  double err = 0, amax = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto oi = static_cast<std::size_t>(perm[i]), oj = static_cast<std::size_t>(perm[j]);
      const double a = s[oi] * psi[oi][oj];
      double lu = 0;
      for (std::size_t k = 0; k < n; ++k) lu += l[i][k] * u[k][j];
      err = std::max(err, std::abs(a - lu));
      amax = std::max(amax, std::abs(a));
    }
  *scale_out = amax;
  return err;
}

}  // namespace

TEST_CASE("sampling matrix rows") {
  const auto g = GridSpec::make(1, 4, 1.0);
  const auto phi = assemble_phi(Trajectory(1, {0.5}), g, KernelSpec::make(1));
  const auto d = to_dense(phi);
  REQUIRE(phi.rows == 1);
  REQUIRE(phi.cols == 4);
  CHECK(phi.nnz() == 2);
  CHECK(d[0][grid_column(g, 0)] == doctest::Approx(0.5));
  CHECK(d[0][grid_column(g, 1)] == doctest::Approx(0.5));

  const auto sel = assemble_phi(Trajectory(1, {-2.0, 0.0, 1.0}), g, KernelSpec::make(1));
  CHECK(sel.nnz() == 3);
  for (double v : sel.values) CHECK(v == 1.0);

  const auto g2 = GridSpec::make(2, 16, 2.0);
  const auto p3 = assemble_phi(Trajectory(2, {0.3, -1.7}), g2, KernelSpec::make(3));
  CHECK(p3.nnz() == 16);

  // Column index layout: dimension 0 outermost.
  CHECK(grid_column(g2, -16, -16) == 0);
  CHECK(grid_column(g2, 0, 1) == 16 * 32 + 17);
}

TEST_CASE("sampling matrix storage invariants") {
  const auto g = GridSpec::make(2, 16, 2.0);
  const auto t = spiral(16, 500);
  const auto phi = assemble_phi(t, g, KernelSpec::make(3));
  CHECK(phi.nnz() <= 16 * t.size());
  for (std::size_t j = 0; j < phi.cols; ++j)
    for (std::size_t p = phi.colptr[j] + 1; p < phi.colptr[j + 1]; ++p) CHECK(phi.rowind[p - 1] < phi.rowind[p]);
  for (double v : phi.values) CHECK(v != 0.0);
  // Interior samples only: the bound is attained.
  const auto in = assemble_phi(Trajectory(2, test::uniform(200, -5, 5, 3)), g, KernelSpec::make(3));
  CHECK(in.nnz() == 16 * 100);
}

TEST_CASE("tableau blocks and nnz identity") {
  SparseMatrix one;
  one.rows = one.cols = 1;
  one.colptr = {0, 1};
  one.rowind = {0};
  one.values = {1.0};
  const auto t = assemble_tableau(one, {1.0}, 0.5);
  const auto d = to_dense(t.psi);
  CHECK(d == Dense{{1.0, 1.0}, {1.0, -0.5}});

  const auto g = GridSpec::make(2, 8, 1.5);
  const auto tr = spiral(8, 120);
  const auto phi = assemble_phi(tr, g, KernelSpec::make(2));
  std::vector<double> w(tr.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.5 + static_cast<double>(i % 3);
  const auto big = assemble_tableau(phi, w, 1e-3);
  CHECK(big.psi.nnz() == 2 * phi.nnz() + tr.size() + g.total());
  const auto bd = to_dense(big.psi);
  const auto pd = to_dense(phi);
  for (std::size_t i = 0; i < bd.size(); ++i)
    for (std::size_t j = 0; j < bd.size(); ++j) CHECK(bd[i][j] == bd[j][i]);
  for (std::size_t i = 0; i < tr.size(); ++i)
    for (std::size_t j = 0; j < g.total(); ++j) CHECK(bd[i][tr.size() + j] == w[i] * pd[i][j]);
  CHECK(bd[tr.size()][tr.size()] == -1e-3);

  CHECK_THROWS_AS(assemble_tableau(phi, {}, 0.0), ValidationError);
  CHECK_THROWS_AS(assemble_tableau(phi, std::vector<double>(tr.size(), -1.0), 1e-3), ValidationError);
}

TEST_CASE("default regularization") {
  SparseMatrix one;
  one.rows = one.cols = 1;
  one.colptr = {0, 1};
  one.rowind = {0};
  one.values = {2.0};
  CHECK(default_rho(one, std::vector<double>{3.0}) == doctest::Approx(36e-6));
}

TEST_CASE("2x2 factorization and solve") {
  SparseMatrix one;
  one.rows = one.cols = 1;
  one.colptr = {0, 1};
  one.rowind = {0};
  one.values = {1.0};
  const auto t = assemble_tableau(one, {1.0}, 0.5);
  for (auto o : {Ordering::constrained_amd, Ordering::amd, Ordering::natural}) {
    const auto f = factorize(t, o);
    double s = 0;
    CHECK(dense_lu_error(t, f, &s) <= 1e-14);
    std::vector<cplx> rhs = {cplx(3.0, -1.5), 0.0};
    f.solve(std::span<cplx>(rhs));
    CHECK(std::abs(rhs[0] - cplx(1.0, -0.5)) < 1e-14);  // r = b / 3
    CHECK(std::abs(rhs[1] - cplx(2.0, -1.0)) < 1e-14);  // c = 2 b / 3
    std::vector<double> zero = {0.0, 0.0};
    f.solve(std::span<double>(zero));
    CHECK(zero == std::vector<double>{0.0, 0.0});
  }
}

TEST_CASE("identity tableau has no fill") {
  TableauSystem t;
  t.m = 5;
  t.l = 0;
  t.rho = 1.0;
  t.psi.rows = t.psi.cols = 5;
  t.psi.colptr = {0, 1, 2, 3, 4, 5};
  t.psi.rowind = {0, 1, 2, 3, 4};
  t.psi.values = {1, 1, 1, 1, 1};
  const auto f = factorize(t, Ordering::natural);
  CHECK(f.nnz_l_strict() == 0);
  const auto r = nnz_report(SparseMatrix{}, t.psi, f);
  CHECK(r.fill_ratio == 1.0);
}

TEST_CASE("random tableaus factor and solve accurately") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto t = random_1d(16, 24, 3, seed % 2 ? 1.0 : 2.0, seed);
    for (auto o : {Ordering::constrained_amd, Ordering::amd, Ordering::natural}) {
      const auto f = factorize(t, o);
      std::vector<int> seen(f.size(), 0);
      for (auto p : f.perm()) seen[static_cast<std::size_t>(p)]++;
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
      for (double s : f.scale()) CHECK(s > 0);
      double amax = 0;
      const double err = dense_lu_error(t, f, &amax);
      CHECK(err <= 1e-10 * amax);
      const auto [res, am] = f.lu_residual(t.psi);
      CHECK(res <= 1e-10 * am);
      CHECK(am == doctest::Approx(amax));

      // Lower factor is unit lower triangular; upper is upper triangular.
      const auto l = f.lower(), u = f.upper();
      for (std::size_t j = 0; j < l.cols; ++j)
        for (std::size_t p = l.colptr[j]; p < l.colptr[j + 1]; ++p) {
          CHECK(static_cast<std::size_t>(l.rowind[p]) >= j);
          if (static_cast<std::size_t>(l.rowind[p]) == j) CHECK(l.values[p] == 1.0);
        }
      for (std::size_t j = 0; j < u.cols; ++j)
        for (std::size_t p = u.colptr[j]; p < u.colptr[j + 1]; ++p) CHECK(static_cast<std::size_t>(u.rowind[p]) <= j);

      auto rhs = test::random_complex(f.size(), seed + 100);
      auto z = rhs;
      f.solve_refined(t.psi, std::span<cplx>(z));
      std::vector<cplx> back(z.size());
      t.psi.multiply(std::span<const cplx>(z), std::span<cplx>(back));
      double num = 0, den = 0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        num += std::norm(back[i] - rhs[i]);
        den += std::norm(rhs[i]);
      }
      CHECK(std::sqrt(num / den) <= 1e-10);
    }
  }
}

TEST_CASE("constrained ordering eliminates the residual block first") {
  const auto t = random_1d(32, 40, 3, 2.0, 5);
  const auto f = factorize(t, Ordering::constrained_amd);
  for (std::size_t k = 0; k < t.m; ++k) CHECK(static_cast<std::size_t>(f.perm()[k]) < t.m);
}

TEST_CASE("singular tableaus are reported") {
  TableauSystem t;
  t.m = 1;
  t.l = 1;
  t.rho = 1.0;
  t.psi.rows = t.psi.cols = 2;
  t.psi.colptr = {0, 2, 4};
  t.psi.rowind = {0, 1, 0, 1};
  t.psi.values = {1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(factorize(t, Ordering::natural), FactorizationError);
}

TEST_CASE("amd ordering") {
  CHECK(amd_order({}).empty());
  // Star graph: the hub must not be eliminated first.
  std::vector<std::vector<std::int32_t>> star(6);
  for (int i = 1; i < 6; ++i) {
    star[0].push_back(i);
    star[static_cast<std::size_t>(i)].push_back(0);
  }
  const auto ps = amd_order(star);
  CHECK(ps.size() == 6);
  CHECK(ps.front() != 0);
  CHECK(std::set<std::int32_t>(ps.begin(), ps.end()).size() == 6);

  // 2D grid Laplacian pattern: AMD fill must beat the natural order.
  const int k = 20;
  std::vector<std::vector<std::int32_t>> adj(k * k);
  auto id = [&](int i, int j) { return i * k + j; };
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i + 1 < k) {
        adj[id(i, j)].push_back(id(i + 1, j));
        adj[id(i + 1, j)].push_back(id(i, j));
      }
      if (j + 1 < k) {
        adj[id(i, j)].push_back(id(i, j + 1));
        adj[id(i, j + 1)].push_back(id(i, j));
      }
    }
  auto fill = [&](const std::vector<std::int32_t>& perm) {
    // Symbolic elimination with explicit sets.
    std::vector<std::set<int>> g(adj.size());
    for (std::size_t v = 0; v < adj.size(); ++v) g[v] = std::set<int>(adj[v].begin(), adj[v].end());
    std::vector<char> gone(adj.size(), 0);
    std::size_t total = 0;
    for (auto v : perm) {
      std::vector<int> nb;
      for (int u : g[static_cast<std::size_t>(v)])
        if (!gone[static_cast<std::size_t>(u)]) nb.push_back(u);
      total += nb.size();
      for (int a : nb)
        for (int b : nb)
          if (a != b) g[static_cast<std::size_t>(a)].insert(b);
      gone[static_cast<std::size_t>(v)] = 1;
    }
    return total;
  };
  std::vector<std::int32_t> natural(adj.size());
  std::iota(natural.begin(), natural.end(), 0);
  const auto pa = amd_order(adj);
  CHECK(std::set<std::int32_t>(pa.begin(), pa.end()).size() == adj.size());
  CHECK(fill(pa) < fill(natural) * 2 / 3);
}
