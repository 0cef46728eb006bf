#include "spurs/dense.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "spurs/error.hpp"

namespace spurs {

namespace {

constexpr double kPi = std::numbers::pi;

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Gauss-Legendre nodes and weights on [-1, 1] via Newton on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1 - z * z) * dp * dp);
  }
}

// Periodic correlation of the image-domain filter, r[j] for j in [0, L).
std::vector<double> periodic_correlation(int degree, std::size_t n, std::size_t l) {
  std::vector<double> h(l, 0.0);
  const long half_l = static_cast<long>(l / 2), half_n = static_cast<long>(n / 2);
  for (long k = -half_l; k < half_l; ++k)
    if (l == n || std::abs(k) < half_n)
      h[static_cast<std::size_t>(k + half_l)] = std::pow(sinc(static_cast<double>(k) / static_cast<double>(l)), degree + 1);
  std::vector<double> r(l, 0.0);
  for (std::size_t j = 0; j < l; ++j) {
    double acc = 0;
    for (long k = -half_l; k < half_l; ++k) {
      const double ph = 2.0 * kPi * static_cast<double>((static_cast<long>(j) * k) % static_cast<long>(l)) /
                        static_cast<double>(l);
      acc += h[static_cast<std::size_t>(k + half_l)] * std::cos(ph);
    }
    r[j] = acc / static_cast<double>(l);
  }
  return r;
}

}  // namespace

double bspline_truncated_power(int degree, double t) {
  if (degree < 0) throw ValidationError("degree must be >= 0");
  const double shift = 0.5 * (degree + 1);
  if (std::abs(t) > shift) return 0.0;
  if (degree == 0) return std::abs(t) < 0.5 ? 1.0 : 0.5;
  double fact = 1;
  for (int i = 2; i <= degree; ++i) fact *= i;
  double s = 0;
  for (int k = 0; k <= degree + 1; ++k) {
    const double u = t + shift - k;
    if (u > 0) s += ((k & 1) ? -1.0 : 1.0) * binomial(degree + 1, k) * std::pow(u, degree);
  }
  return std::max(0.0, s / fact);
}

double raq_kspace(int degree, long n) {
  std::vector<double> gx, gw;
  gauss_legendre(48, gx, gw);
  const double half = 0.5 * (degree + 1);
  double total = 0;
  // One panel per knot interval, each split in four.
  for (int seg = 0; seg < degree + 1; ++seg) {
    for (int sub = 0; sub < 4; ++sub) {
      const double a = -half + seg + 0.25 * sub, b = a + 0.25;
      const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const double k = mid + rad * gx[i];
        total += rad * gw[i] * sinc(k - static_cast<double>(n)) * bspline_truncated_power(degree, k);
      }
    }
  }
  return total;
}

double raq_image(int degree, long n) {
  std::vector<double> gx, gw;
  gauss_legendre(48, gx, gw);
  double total = 0;
  const int panels = 16 + 4 * static_cast<int>(std::abs(n));
  for (int s = 0; s < panels; ++s) {
    const double a = -0.5 + static_cast<double>(s) / panels, b = a + 1.0 / panels;
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double x = mid + rad * gx[i];
      total += rad * gw[i] * std::pow(sinc(x), degree + 1) * std::cos(2.0 * kPi * static_cast<double>(n) * x);
    }
  }
  return total;
}

ComplexGrid dense_oracle(const Trajectory& traj, const ReconConfig& config, std::span<const cplx> b) {
  config.validate();
  const GridSpec grid = GridSpec::make(traj.dim(), config.n, config.sigma);
  const std::size_t m = traj.size(), l = grid.size, total = grid.total();
  if (m + total > 2000) throw ValidationError("dense oracle is limited to M + L^dim <= 2000");
  if (b.size() != m) throw ValidationError("sample count does not match the trajectory");
  const double sigma = grid.sigma();
  const double extent = 0.5 * static_cast<double>(grid.n);
  const long half = static_cast<long>(l / 2);

  Mat sq = Mat::Zero(static_cast<long>(m), static_cast<long>(total));
  for (std::size_t i = 0; i < m; ++i) {
    auto k = traj.point(i);
    for (int d = 0; d < grid.dim; ++d)
      if (std::abs(k[d]) > extent) throw OutOfExtentError("dense oracle: sample outside the grid extent");
    for (std::size_t col = 0; col < total; ++col) {
      const long n0 = static_cast<long>(grid.dim == 1 ? col : col / l) - half;
      double v = bspline_truncated_power(config.degree, k[0] * sigma - static_cast<double>(n0));
      if (grid.dim == 2 && v != 0.0) {
        const long n1 = static_cast<long>(col % l) - half;
        v *= bspline_truncated_power(config.degree, k[1] * sigma - static_cast<double>(n1));
      }
      sq(static_cast<long>(i), static_cast<long>(col)) = v;
    }
  }
  Vec gbar = Vec::Ones(static_cast<long>(m));
  if (!config.gamma_bar.empty()) {
    if (config.gamma_bar.size() != m) throw ValidationError("weight vector length mismatch");
    for (std::size_t i = 0; i < m; ++i) gbar(static_cast<long>(i)) = config.gamma_bar[i];
  }
  const Mat gq = gbar.asDiagonal() * sq;
  double rho = config.rho;
  if (!(rho > 0)) rho = 1e-6 * gq.squaredNorm() / static_cast<double>(m);

  Eigen::BDCSVD<Mat> svd(gq, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  Vec filt(s.size());
  for (long i = 0; i < s.size(); ++i) filt(i) = s(i) / (s(i) * s(i) + rho);
  auto solve = [&](const Vec& rhs) -> Vec {
    return svd.matrixV() * (filt.asDiagonal() * (svd.matrixU().transpose() * rhs));
  };
  Vec bre(static_cast<long>(m)), bim(static_cast<long>(m));
  for (std::size_t i = 0; i < m; ++i) {
    bre(static_cast<long>(i)) = gbar(static_cast<long>(i)) * b[i].real();
    bim(static_cast<long>(i)) = gbar(static_cast<long>(i)) * b[i].imag();
  }
  const Vec cre = solve(bre), cim = solve(bim);

  const std::vector<double> r = periodic_correlation(config.degree, grid.n, l);
  auto rc = [&](long a, long bb) { return r[static_cast<std::size_t>(((a - bb) % static_cast<long>(l) + static_cast<long>(l)) % static_cast<long>(l))]; };
  Mat aq(static_cast<long>(total), static_cast<long>(total));
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j) {
      if (grid.dim == 1) {
        aq(static_cast<long>(i), static_cast<long>(j)) = rc(static_cast<long>(i), static_cast<long>(j));
      } else {
        aq(static_cast<long>(i), static_cast<long>(j)) =
            rc(static_cast<long>(i / l), static_cast<long>(j / l)) * rc(static_cast<long>(i % l), static_cast<long>(j % l));
      }
    }
  const Vec dre = aq * cre, dim = aq * cim;
  ComplexGrid d{grid, std::vector<cplx>(total)};
  for (std::size_t i = 0; i < total; ++i) d.values[i] = {dre(static_cast<long>(i)), dim(static_cast<long>(i))};
  return d;
}

AngleDiagnostics angle_diagnostics(const Trajectory& traj, int degree, std::size_t n,
                                   std::span<const cplx> coeffs, const AngleOptions& options) {
  if (traj.dim() != 1) throw ValidationError("angle diagnostics are defined for 1D trajectories");
  if (n == 0 || n % 2 != 0) throw ValidationError("N must be even and positive");
  if (traj.size() != n) throw ValidationError("angle diagnostics need M = N samples");
  if (coeffs.size() != n) throw ValidationError("coefficient vector must have N entries");
  if (n + traj.size() > 2000) throw ValidationError("angle diagnostics are limited to small instances");
  const std::size_t kq = options.samples;
  const double x0 = -0.5 * options.extent, h = options.extent / static_cast<double>(kq);
  if (kq < 4 * n) throw ValidationError("too few quadrature samples for the basis size");

  const long half = static_cast<long>(n / 2);
  const long rows = static_cast<long>(kq), cols = static_cast<long>(n);
  // Columns scaled by sqrt(h) so the Euclidean product is the L2 product.
  CMat a(rows, cols), q(rows, cols), s(rows, static_cast<long>(traj.size()));
  const double sh = std::sqrt(h);
  for (long r = 0; r < rows; ++r) {
    const double x = x0 + h * static_cast<double>(r);
    const double rect = std::abs(x) < 0.5 ? 1.0 : (std::abs(x) == 0.5 ? 0.5 : 0.0);
    const double env = std::pow(sinc(x), degree + 1);
    for (long c = 0; c < cols; ++c) {
      const cplx ph = std::polar(sh, 2.0 * kPi * static_cast<double>(c - half) * x);
      a(r, c) = rect * ph;
      q(r, c) = (options.q_equals_a ? rect : env) * ph;
    }
    for (long c = 0; c < static_cast<long>(traj.size()); ++c)
      s(r, c) = std::polar(sh, 2.0 * kPi * traj.point(static_cast<std::size_t>(c))[0] * x);
  }

  auto orth = [](const CMat& m) -> CMat {
    Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeThinU);
    return svd.matrixU();
  };
  const CMat ua = orth(a), uq = orth(q), us = orth(s);
  auto smin = [](const CMat& m) {
    Eigen::BDCSVD<CMat> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
  };
  AngleDiagnostics out;
  out.cos_qs = std::min(1.0, smin(us.adjoint() * uq));
  const double cos_as = std::min(1.0, smin(us.adjoint() * ua));
  const double cos_aq = std::min(1.0, smin(uq.adjoint() * ua));
  out.sin_as = std::sqrt(std::max(0.0, 1.0 - cos_as * cos_as));
  out.sin_aq = std::sqrt(std::max(0.0, 1.0 - cos_aq * cos_aq));
  if (out.cos_qs < 1e-12) throw DegenerateGeometryError("cos(Q, S) vanishes; the error bound is undefined");

  Eigen::VectorXcd fc(cols);
  for (long c = 0; c < cols; ++c) fc(c) = coeffs[static_cast<std::size_t>(c)];
  const Eigen::VectorXcd f = a * fc;
  // E f = Q (S*Q)^-1 S* f, then project onto A.
  const CMat sq = s.adjoint() * q;
  const Eigen::VectorXcd ef = q * sq.fullPivLu().solve(s.adjoint() * f);
  const Eigen::VectorXcd pae = ua * (ua.adjoint() * ef);
  out.error_sq = (f - pae).squaredNorm();
  const Eigen::VectorXcd pq_perp = f - uq * (uq.adjoint() * f);
  out.projection_sq = pq_perp.squaredNorm();
  out.signal_sq = f.squaredNorm();
  const double ratio = out.sin_as * out.sin_as / (out.cos_qs * out.cos_qs);
  out.bound = ratio * out.projection_sq;
  out.bound_loose = ratio * out.sin_aq * out.sin_aq * out.signal_sq;
  return out;
}

}  // namespace spurs
