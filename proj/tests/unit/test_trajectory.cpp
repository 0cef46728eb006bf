#include <cmath>
#include <fstream>

#include "doctest.h"
#include "spurs/error.hpp"
#include "spurs/trajectory.hpp"
#include "unit/support.hpp"

using namespace spurs;

TEST_CASE("radial trajectory geometry") {
  const auto t = radial(256, 100, 512);
  CHECK(t.size() == 51200);
  CHECK(t.point(0)[0] == doctest::Approx(-128.0));
  CHECK(t.point(0)[1] == doctest::Approx(0.0));
  const auto c = t.point(256);  // r = bins / 2
  CHECK(std::abs(c[0]) < 1e-12);
  CHECK(std::abs(c[1]) < 1e-12);
  const auto two = radial(64, 2, 16);
  for (std::size_t r = 0; r < 16; ++r) CHECK(std::abs(two.point(16 + r)[0]) < 1e-12);
}

TEST_CASE("spiral trajectory geometry") {
  const auto t = spiral(256, 100);
  CHECK(t.point(0)[0] == 0.0);
  CHECK(t.point(0)[1] == 0.0);
  CHECK(std::hypot(t.point(99)[0], t.point(99)[1]) == doctest::Approx(128.0 * std::sqrt(0.99)).epsilon(1e-12));
  const auto big = spiral(256, 30000);
  CHECK(big.size() == 30000);
  for (std::size_t m = 0; m < big.size(); ++m) CHECK(std::hypot(big.point(m)[0], big.point(m)[1]) <= 128.0);
}

TEST_CASE("covering radius") {
  std::vector<double> pts;
  for (int k = -4; k <= 4; ++k) pts.push_back(k);
  CHECK(covering_radius(Trajectory(1, pts), 8) == doctest::Approx(0.5).epsilon(0.05));

  // A single point at the origin: the farthest probes are the corners.
  const double g = covering_radius(Trajectory(2, {0.0, 0.0}), 8);
  CHECK(g == doctest::Approx(std::sqrt(32.0)).epsilon(1e-12));

  const double sparse = covering_radius(spiral(32, 300), 32);
  const double dense = covering_radius(spiral(32, 3000), 32);
  CHECK(dense <= sparse);
}

TEST_CASE("trajectory files") {
  const auto dir = test::scratch("traj");
  const auto t = spiral(64, 500);
  save_trajectory(t, (dir / "t.csv").string());
  const auto back = load_trajectory((dir / "t.csv").string());
  CHECK(back.dim() == 2);
  CHECK(back.points() == t.points());
  CHECK(back.hash() == t.hash());

  save_trajectory(t, (dir / "t.raw").string());
  CHECK(load_trajectory((dir / "t.raw").string()).points() == t.points());

  {
    std::ofstream f(dir / "h.csv");
    f << "kx,ky\n1.5,-2\n0,0.25\n";
  }
  const auto h = load_trajectory((dir / "h.csv").string());
  CHECK(h.dim() == 2);
  CHECK(h.size() == 2);
  CHECK(h.point(0)[1] == -2.0);
  {
    std::ofstream f(dir / "one.csv");
    f << "kx\n1\n2\n3\n";
  }
  CHECK(load_trajectory((dir / "one.csv").string()).dim() == 1);
  {
    std::ofstream f(dir / "nan.csv");
    f << "kx,ky\n1,2\nnan,0\n";
  }
  CHECK_THROWS_AS(load_trajectory((dir / "nan.csv").string()), IoError);
  CHECK_THROWS_AS(load_trajectory((dir / "missing.csv").string()), IoError);
  CHECK_THROWS_AS(Trajectory(2, {0.0, NAN}), ValidationError);
}

TEST_CASE("trajectory hash identifies the pattern") {
  CHECK(radial(64, 10, 32).hash() == radial(64, 10, 32).hash());
  CHECK(radial(64, 10, 32).hash() != radial(64, 11, 32).hash());
  CHECK(radial(64, 10, 32).hash().size() == 16);
}
