#include "spurs/bessel.hpp"

#include <cmath>
#include <numbers>

namespace spurs {

namespace {

double j1_series(double x) {
  // J1(x) = sum_k (-1)^k (x/2)^(2k+1) / (k! (k+1)!)
  const double h = 0.5 * x;
  const double h2 = h * h;
  double term = h;
  double sum = term;
  for (int k = 1; k < 80; ++k) {
    term *= -h2 / (static_cast<double>(k) * static_cast<double>(k + 1));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double j1_asymptotic(double x) {
  // J1(x) ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)), chi = x - 3 pi / 4,
  // with mu = 4 and the standard Hankel P, Q series truncated at the
  // smallest term.
  const double mu = 4.0;
  const double z8 = 8.0 * x;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double prev = INFINITY;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (static_cast<double>(k) * z8);
    if (std::abs(term) > prev) break;
    prev = std::abs(term);
    // Terms alternate between Q (odd k) and P (even k) with sign pattern
    // +Q1, -P2, -Q3, +P4, ...
    const int r = k % 4;
    if (r == 1)
      q += term;
    else if (r == 2)
      p -= term;
    else if (r == 3)
      q -= term;
    else
      p += term;
    if (std::abs(term) < 1e-17) break;
  }
  const double chi = x - 0.75 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j1(double x) {
  const double ax = std::abs(x);
  const double v = ax < 12.0 ? j1_series(ax) : j1_asymptotic(ax);
  return x < 0 ? -v : v;
}

double bessel_i0(double x) {
  // I0(x) = sum_k ((x/2)^k / k!)^2
  const double h2 = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= h2 / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace spurs
