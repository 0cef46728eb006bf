#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spurs/engine.hpp"

namespace spurs {

// Reference reconstruction from dense operators, independent of the FFT,
// the sparse solver and the Cox-de Boor evaluator:
//   S*Q[m, n] = beta^p(kappa_m sigma - n) (truncated-power form),
//   c = argmin |gbar (b - S*Q c)|^2 + rho |c|^2 via an SVD,
//   d = (A*A)^-1 (A*Q) c with A*A = I and A*Q the periodic correlation of the
//   image-domain filter. Requires M + L^dim <= 2000.
ComplexGrid dense_oracle(const Trajectory& traj, const ReconConfig& config, std::span<const cplx> b);

// beta^p(t) = (1/p!) sum_k (-1)^k C(p+1, k) (t + (p+1)/2 - k)_+^p.
double bspline_truncated_power(int degree, double t);

// r[n] = integral of sinc(k - n) beta^p(k) dk, by Gauss-Legendre quadrature
// over each knot interval of the spline.
double raq_kspace(int degree, long n);
// The same correlation evaluated in the image domain:
// integral over [-1/2, 1/2] of sinc^(p+1)(x) cos(2 pi n x) dx.
double raq_image(int degree, long n);

struct AngleDiagnostics {
  double cos_qs = 0;       // cos(Q, S)
  double sin_as = 0;       // sin(A, S)
  double sin_aq = 0;       // sin(A, Q)
  double error_sq = 0;     // |f - P_A E f|^2
  double projection_sq = 0;// |P_{Q-perp} f|^2
  double signal_sq = 0;    // |f|^2
  double bound = 0;        // sin^2(A,S) / cos^2(Q,S) |P_{Q-perp} f|^2
  double bound_loose = 0;  // sin^2(A,S) sin^2(A,Q) / cos^2(Q,S) |f|^2
};

struct AngleOptions {
  double extent = 4.0;          // image-domain window [-X/2, X/2)
  std::size_t samples = 1024;   // quadrature points over the window
  bool q_equals_a = false;      // replace the spline basis by the sinc basis
};

// Principal-angle quantities for a 1D, sigma = 1 instance in the image-domain
// picture: a_n = rect(x) e^{2 pi i n x}, q_n = sinc^(p+1)(x) e^{2 pi i n x},
// s_m = e^{2 pi i kappa_m x}. f = sum_n coeffs[n] a_n. Needs M = N so that
// Q and the complement of S form a direct sum. Throws
// DegenerateGeometryError when cos(Q, S) vanishes.
AngleDiagnostics angle_diagnostics(const Trajectory& traj, int degree, std::size_t n,
                                   std::span<const cplx> coeffs, const AngleOptions& options = {});

}  // namespace spurs
