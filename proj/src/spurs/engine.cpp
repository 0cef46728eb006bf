#include "spurs/engine.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "spurs/error.hpp"
#include "spurs/io.hpp"
#include "spurs/log.hpp"
#include "spurs/parallel.hpp"

namespace spurs {

namespace {

constexpr char kMagic[9] = {'S', 'P', 'U', 'R', 'S', 'F', 'A', 'C', '1'};
constexpr std::uint64_t kPlanVersion = 1;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double norm2(std::span<const cplx> v) {
  double s = 0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void ReconConfig::validate() const {
  if (degree < 0) throw ValidationError("degree must be >= 0");
  if (!(sigma >= 1.0)) throw ValidationError("oversampling must be >= 1");
  if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
  if (!(tol >= 0)) throw ValidationError("tolerance must be >= 0");
  if (std::isnan(rho) || std::isinf(rho)) throw ValidationError("rho must be finite");
}

std::vector<double> lsi_filter(int degree, const GridSpec& grid) {
  if (degree < 0) throw ValidationError("degree must be >= 0");
  const long l = static_cast<long>(grid.size);
  const long half_n = static_cast<long>(grid.n / 2);
  std::vector<double> h(grid.size, 0.0);
  for (long i = 0; i < l; ++i) {
    const long n = i - l / 2;
    // Without oversampling every node is inside the FOV, including -N/2.
    if (grid.size != grid.n && std::abs(n) >= half_n) continue;
    h[static_cast<std::size_t>(i)] = std::pow(sinc(static_cast<double>(n) / static_cast<double>(l)), degree + 1);
  }
  return h;
}

void apply_filter(std::span<cplx> image, const GridSpec& grid, std::span<const double> h) {
  const std::size_t l = grid.size;
  if (h.size() != l || image.size() != grid.total()) throw ValidationError("filter size mismatch");
  if (grid.dim == 1) {
    for (std::size_t i = 0; i < l; ++i) image[i] *= h[i];
    return;
  }
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) image[i * l + j] *= h[i] * h[j];
}

NnzReport OfflinePlan::nnz() const {
  NnzReport r;
  r.nnz_phi = nnz_phi;
  r.nnz_psi = tableau.psi.nnz();
  r.nnz_lu = factor.nnz_lu();
  r.fill_ratio = r.nnz_psi ? static_cast<double>(r.nnz_lu) / static_cast<double>(r.nnz_psi) : 0.0;
  return r;
}

OfflinePlan plan_offline(const Trajectory& traj, const ReconConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  OfflinePlan plan;
  plan.grid = GridSpec::make(traj.dim(), config.n, config.sigma);
  plan.kernel = KernelSpec::make(config.degree);
  plan.trajectory = traj;
  plan.trajectory_hash = traj.hash();
  log_message(LogLevel::info, "phase 1: assembling sampling matrix");
  const SparseMatrix phi = assemble_phi(traj, plan.grid, plan.kernel);
  plan.nnz_phi = phi.nnz();
  plan.rho = config.rho > 0 ? config.rho : default_rho(phi, config.gamma_bar);
  plan.tableau = assemble_tableau(phi, config.gamma_bar, plan.rho);
  log_message(LogLevel::info, "phase 1: factorizing tableau");
  plan.factor = factorize(plan.tableau, config.ordering);
  plan.filter = lsi_filter(config.degree, plan.grid);
  std::ostringstream msg;
  msg << "phase 1: done in " << elapsed_ms(t0) << " ms, nnz(L+U) = " << plan.factor.nnz_lu();
  log_message(LogLevel::info, msg.str());
  return plan;
}

void save_plan(const OfflinePlan& plan, const std::string& path) {
  BinaryWriter w(path);
  w.bytes(kMagic, sizeof kMagic);
  w.u64(kPlanVersion);
  w.u64(static_cast<std::uint64_t>(plan.grid.dim));
  w.u64(plan.grid.n);
  w.u64(plan.grid.size);
  w.u64(static_cast<std::uint64_t>(plan.kernel.degree));
  w.f64(plan.rho);
  w.str(plan.trajectory_hash);
  w.u64(plan.m());
  w.u64(plan.nnz_phi);
  w.f64s(plan.trajectory.points());
  w.f64s(plan.tableau.gamma_bar);
  const SparseMatrix& psi = plan.tableau.psi;
  w.u64(psi.rows);
  w.u64s(std::vector<std::uint64_t>(psi.colptr.begin(), psi.colptr.end()));
  w.u64s(std::vector<std::uint64_t>(psi.rowind.begin(), psi.rowind.end()));
  w.f64s(psi.values);
  plan.factor.write(w);
  w.str("FILTER");
  w.f64s(plan.filter);
  w.finish();
}

OfflinePlan load_plan(const std::string& path) {
  BinaryReader r(path);
  char magic[sizeof kMagic];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw IoError(path + ": not a SPURSFAC1 plan file");
  if (r.u64() != kPlanVersion) throw IoError(path + ": unsupported plan version");
  OfflinePlan plan;
  const auto dim = static_cast<int>(r.u64());
  const auto n = r.u64();
  const auto size = r.u64();
  plan.kernel = KernelSpec::make(static_cast<int>(r.u64()));
  try {
    plan.grid = GridSpec::make(dim, n, static_cast<double>(size) / static_cast<double>(n));
  } catch (const ValidationError& e) {
    throw IoError(path + ": bad grid metadata: " + e.what());
  }
  plan.rho = r.f64();
  plan.trajectory_hash = r.str();
  const auto m = r.u64();
  plan.nnz_phi = r.u64();
  plan.trajectory = Trajectory(dim, r.f64s(), "plan:" + path);
  plan.tableau.gamma_bar = r.f64s();
  SparseMatrix& psi = plan.tableau.psi;
  psi.rows = psi.cols = r.u64();
  const auto cp = r.u64s();
  const auto ri = r.u64s();
  psi.values = r.f64s();
  plan.tableau.m = m;
  plan.tableau.l = plan.grid.total();
  plan.tableau.rho = plan.rho;
  if (plan.trajectory.size() != m || plan.tableau.gamma_bar.size() != m || psi.rows != m + plan.tableau.l ||
      cp.size() != psi.cols + 1 || cp.back() != ri.size() || ri.size() != psi.values.size() ||
      plan.trajectory.hash() != plan.trajectory_hash)
    throw IoError(path + ": plan sections are inconsistent");
  psi.colptr.assign(cp.begin(), cp.end());
  psi.rowind.resize(ri.size());
  for (std::size_t p = 0; p < ri.size(); ++p) {
    if (ri[p] >= psi.rows) throw IoError(path + ": tableau index out of range");
    psi.rowind[p] = static_cast<std::int32_t>(ri[p]);
  }
  plan.factor = Factorization::read(r);
  if (plan.factor.size() != psi.rows || plan.factor.m() != m) throw IoError(path + ": factor size mismatch");
  if (r.str() != "FILTER") throw IoError(path + ": missing filter block");
  plan.filter = r.f64s();
  if (plan.filter.size() != plan.grid.size) throw IoError(path + ": filter length mismatch");
  r.expect_end();
  log_message(LogLevel::info, "plan loaded from " + path + "; phase 1 skipped");
  return plan;
}

Reconstruction reconstruct_once(const OfflinePlan& plan, std::span<const cplx> b) {
  const std::size_t m = plan.m();
  if (b.size() != m)
    throw ValidationError("sample count " + std::to_string(b.size()) + " does not match the plan (" +
                          std::to_string(m) + ")");
  const std::size_t total = plan.grid.total();
  std::vector<cplx> z(m + total, cplx{});
  for (std::size_t i = 0; i < m; ++i) z[i] = plan.tableau.gamma_bar[i] * b[i];
  plan.factor.solve_refined(plan.tableau.psi, z);

  ComplexGrid c{plan.grid, std::vector<cplx>(z.begin() + static_cast<long>(m), z.end())};
  std::vector<cplx> e = inverse_dft(c);
  apply_filter(e, plan.grid, plan.filter);
  Reconstruction out;
  out.d = forward_dft(plan.grid, e);
  out.image = crop_to_fov(e, plan.grid);
  const double scale = plan.grid.dim == 1 ? static_cast<double>(plan.grid.n)
                                          : static_cast<double>(plan.grid.n) * static_cast<double>(plan.grid.n);
  for (auto& v : out.image.pixels) v *= scale;
  return out;
}

std::vector<cplx> resample_nonuniform(const ComplexGrid& d, const Trajectory& traj) {
  const GridSpec& g = d.spec;
  if (traj.dim() != g.dim) throw ValidationError("trajectory and grid dimensions differ");
  if (d.values.size() != g.total()) throw ValidationError("coefficient grid has the wrong size");
  const std::size_t l = g.size;
  const long half = static_cast<long>(g.half());
  const double sigma = g.sigma();
  // Row of sinc(x - n) over n in [-L/2, L/2); exact Kronecker delta on nodes.
  auto fill = [&](double x, std::vector<double>& row) {
    const double xr = std::round(x);
    if (x == xr) {
      std::fill(row.begin(), row.end(), 0.0);
      const long k = static_cast<long>(xr) + half;
      if (k >= 0 && k < static_cast<long>(l)) row[static_cast<std::size_t>(k)] = 1.0;
      return;
    }
    const double s = std::sin(std::numbers::pi * (x - xr));  // sin(pi x) up to (-1)^xr
    const bool odd_shift = (static_cast<long>(xr) & 1L) != 0;
    for (std::size_t i = 0; i < l; ++i) {
      const long n = static_cast<long>(i) - half;
      const bool odd = ((n & 1L) != 0) != odd_shift;
      row[i] = (odd ? -s : s) / (std::numbers::pi * (x - static_cast<double>(n)));
    }
  };
  std::vector<cplx> out(traj.size());
  parallel_for(
      traj.size(),
      [&](std::size_t lo, std::size_t hi) {
        std::vector<double> r0(l), r1(l);
        for (std::size_t m = lo; m < hi; ++m) {
          auto k = traj.point(m);
          fill(k[0] * sigma, r0);
          cplx acc = 0;
          if (g.dim == 1) {
            for (std::size_t i = 0; i < l; ++i) acc += r0[i] * d.values[i];
          } else {
            fill(k[1] * sigma, r1);
            for (std::size_t i = 0; i < l; ++i) {
              if (r0[i] == 0.0) continue;
              const cplx* row = d.values.data() + i * l;
              cplx inner = 0;
              for (std::size_t j = 0; j < l; ++j) inner += r1[j] * row[j];
              acc += r0[i] * inner;
            }
          }
          out[m] = acc;
        }
      },
      8);
  return out;
}

cplx optimal_step(std::span<const cplx> eps, std::span<const cplx> v) {
  if (eps.size() != v.size()) throw ValidationError("optimal_step: length mismatch");
  double vv = 0;
  cplx ve = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    vv += std::norm(v[i]);
    ve += std::conj(v[i]) * eps[i];
  }
  if (vv == 0) throw NumericalError("optimal_step: update direction is zero");
  return ve / vv;
}

IterativeResult reconstruct_iterative(const OfflinePlan& plan, std::span<const cplx> b, int max_iter,
                                      double tol) {
  if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
  IterativeResult res;
  res.result = reconstruct_once(plan, b);
  const double bnorm = norm2(b);
  if (max_iter == 1 || bnorm == 0) {
    if (bnorm == 0) res.converged = true;
    res.history.push_back({0, 0.0, cplx{}});
    if (bnorm != 0) {
      const auto bt = resample_nonuniform(res.result.d, plan.trajectory);
      std::vector<cplx> eps(b.begin(), b.end());
      for (std::size_t i = 0; i < eps.size(); ++i) eps[i] -= bt[i];
      res.history.back().error_norm = norm2(eps);
      res.converged = res.history.back().error_norm <= tol * bnorm;
    }
    return res;
  }

  // eps_p = b - S*A d_p, updated in residual form eps_{p+1} = eps_p - alpha v.
  std::vector<cplx> eps(b.begin(), b.end());
  {
    const auto bt = resample_nonuniform(res.result.d, plan.trajectory);
    for (std::size_t i = 0; i < eps.size(); ++i) eps[i] -= bt[i];
  }
  for (int p = 0;; ++p) {
    IterationRecord rec{p, norm2(eps), cplx{}};
    res.history.push_back(rec);
    if (rec.error_norm <= tol * bnorm) {
      res.converged = true;
      break;
    }
    if (p + 1 >= max_iter) break;
    Reconstruction ge = reconstruct_once(plan, eps);
    const auto v = resample_nonuniform(ge.d, plan.trajectory);
    double vv = 0;
    for (const auto& x : v) vv += std::norm(x);
    if (vv == 0) {
      res.converged = true;
      break;
    }
    const cplx alpha = optimal_step(eps, v);
    res.history.back().alpha = alpha;
    for (std::size_t i = 0; i < res.result.d.values.size(); ++i) res.result.d.values[i] += alpha * ge.d.values[i];
    for (std::size_t i = 0; i < res.result.image.pixels.size(); ++i)
      res.result.image.pixels[i] += alpha * ge.image.pixels[i];
    for (std::size_t i = 0; i < eps.size(); ++i) eps[i] -= alpha * v[i];
  }
  return res;
}

}  // namespace spurs
