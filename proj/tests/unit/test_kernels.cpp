#include <cmath>
#include <random>

#include "doctest.h"
#include "spurs/error.hpp"
#include "spurs/kernels.hpp"
#include "unit/support.hpp"

using namespace spurs;

namespace {

// beta^p sampled on a fine grid by repeated numerical convolution of the box.
struct ConvolvedSpline {
  double h;
  std::vector<double> v;  // centered, v[i] at t = (i - (size-1)/2) * h
  double at(double t) const {
    const double pos = t / h + 0.5 * static_cast<double>(v.size() - 1);
    const auto i = static_cast<long>(std::floor(pos));
    if (i < 0 || i + 1 >= static_cast<long>(v.size())) return 0.0;
    const double f = pos - static_cast<double>(i);
    return (1 - f) * v[static_cast<std::size_t>(i)] + f * v[static_cast<std::size_t>(i + 1)];
  }
};

ConvolvedSpline convolved(int p, int per_unit) {
  const double h = 1.0 / per_unit;
  std::vector<double> box(static_cast<std::size_t>(per_unit) + 1, 1.0);
  box.front() = box.back() = 0.5;
  std::vector<double> cur = box;
  for (int k = 0; k < p; ++k) {
    std::vector<double> next(cur.size() + box.size() - 1, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = 0; j < box.size(); ++j) next[i + j] += cur[i] * box[j] * h;
    cur.swap(next);
  }
  return {h, cur};
}

}  // namespace

TEST_CASE("bspline closed values") {
  CHECK(bspline_eval(0, 0.0) == 1.0);
  CHECK(bspline_eval(0, 0.5) == 0.5);
  CHECK(bspline_eval(0, -0.5) == 0.5);
  CHECK(bspline_eval(1, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bspline_eval(3, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  for (int p = 0; p <= 5; ++p) {
    CHECK(bspline_eval(p, (p + 1) / 2.0 + 0.1) == 0.0);
    CHECK(bspline_eval(p, -(p + 1) / 2.0 - 0.1) == 0.0);
  }
}

TEST_CASE("bspline equals the repeated box convolution") {
  for (int p : {1, 2, 3}) {
    const auto ref = convolved(p, 400);
    for (double t = -2.3; t <= 2.3; t += 0.137) CHECK(std::abs(bspline_eval(p, t) - ref.at(t)) < 2e-4);
  }
  CHECK(std::abs(convolved(3, 400).at(0.0) - 2.0 / 3.0) < 1e-4);
}

TEST_CASE("bspline is symmetric, nonnegative and a partition of unity") {
  const auto ts = test::uniform(2000, -5, 5, 17);
  for (int p = 0; p <= 5; ++p) {
    for (double t : ts) {
      CHECK(bspline_eval(p, t) >= 0.0);
      CHECK(bspline_eval(p, t) == doctest::Approx(bspline_eval(p, -t)).epsilon(1e-13));
      double s = 0;
      for (long n = static_cast<long>(std::floor(t)) - 4; n <= static_cast<long>(std::floor(t)) + 4; ++n)
        s += bspline_eval(p, t - static_cast<double>(n));
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("footprints") {
  const auto g1 = GridSpec::make(1, 8, 1.0);
  const auto k1 = KernelSpec::make(1);
  {
    const double kappa[] = {0.5};
    const auto f = footprint(kappa, g1, k1);
    REQUIRE(f.count() == 2);
    CHECK(f.taps[0][0].index == 0);
    CHECK(f.taps[0][0].weight == doctest::Approx(0.5));
    CHECK(f.taps[0][1].index == 1);
    CHECK(f.taps[0][1].weight == doctest::Approx(0.5));
  }
  {
    const double kappa[] = {2.0};
    const auto f = footprint(kappa, g1, k1);
    REQUIRE(f.count() == 1);
    CHECK(f.taps[0][0].index == 2);
    CHECK(f.taps[0][0].weight == doctest::Approx(1.0));
  }
  {
    const auto g2 = GridSpec::make(2, 16, 2.0);
    const auto k3 = KernelSpec::make(3);
    const double kappa[] = {1.3, -2.71};
    const auto f = footprint(kappa, g2, k3);
    CHECK(f.count() == 16);
    for (const auto& t : f.taps[0]) CHECK(t.weight == doctest::Approx(bspline_eval(3, kappa[0] * 2.0 - static_cast<double>(t.index))));
    for (const auto& t : f.taps[1]) CHECK(t.weight == doctest::Approx(bspline_eval(3, kappa[1] * 2.0 - static_cast<double>(t.index))));
  }
  {
    const double outside[] = {4.5};
    CHECK_THROWS_AS(footprint(outside, g1, k1), OutOfExtentError);
  }
  CHECK_THROWS_AS(KernelSpec::make(-1), ValidationError);
}
