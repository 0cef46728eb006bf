#include "spurs/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "spurs/error.hpp"
#include "spurs/io.hpp"
#include "spurs/parallel.hpp"

namespace spurs {

Trajectory::Trajectory(int dim, std::vector<double> points, std::string label)
    : dim_(dim), points_(std::move(points)), label_(std::move(label)) {
  if (dim_ != 1 && dim_ != 2)
    throw ValidationError("trajectory dimension must be 1 or 2");
  if (points_.empty() || points_.size() % static_cast<std::size_t>(dim_) != 0)
    throw ValidationError("trajectory needs at least one complete point");
  for (double v : points_)
    if (!std::isfinite(v)) throw ValidationError("trajectory contains a non-finite coordinate");
}

std::string Trajectory::hash() const {
  Fnv1a h;
  const auto d = static_cast<std::uint64_t>(dim_);
  h.update(&d, sizeof d);
  h.update(points_.data(), points_.size() * sizeof(double));
  return h.hex();
}

Trajectory radial(std::size_t n, std::size_t spokes, std::size_t bins) {
  if (n == 0 || spokes < 1 || bins < 2)
    throw ValidationError("radial trajectory needs N > 0, spokes >= 1, bins >= 2");
  std::vector<double> pts;
  pts.reserve(2 * spokes * bins);
  const double nn = static_cast<double>(n);
  for (std::size_t s = 0; s < spokes; ++s) {
    const double w = std::numbers::pi * static_cast<double>(s) / static_cast<double>(spokes);
    const double c = std::cos(w), sn = std::sin(w);
    for (std::size_t r = 0; r < bins; ++r) {
      const double rad = nn * (static_cast<double>(r) / static_cast<double>(bins) - 0.5);
      pts.push_back(rad * c);
      pts.push_back(rad * sn);
    }
  }
  std::ostringstream label;
  label << "radial(N=" << n << ",spokes=" << spokes << ",bins=" << bins << ")";
  return Trajectory(2, std::move(pts), label.str());
}

Trajectory spiral(std::size_t n, std::size_t m) {
  if (n == 0 || m < 1) throw ValidationError("spiral trajectory needs N > 0 and M >= 1");
  std::vector<double> pts;
  pts.reserve(2 * m);
  const double half = 0.5 * static_cast<double>(n);
  for (std::size_t j = 0; j < m; ++j) {
    const double jj = static_cast<double>(j);
    const double rad = half * std::sqrt(jj / static_cast<double>(m));
    const double w = 2.0 * std::numbers::pi * std::sqrt(jj / std::numbers::pi);
    pts.push_back(rad * std::cos(w));
    pts.push_back(rad * std::sin(w));
  }
  std::ostringstream label;
  label << "spiral(N=" << n << ",M=" << m << ")";
  return Trajectory(2, std::move(pts), label.str());
}

namespace {

// Uniform bucket grid for nearest-neighbour queries.
class PointIndex {
 public:
  PointIndex(const Trajectory& traj, double lo, double hi) : traj_(traj), dim_(traj.dim()) {
    lo_ = lo;
    const std::size_t m = traj.size();
    cells_ = std::max<std::size_t>(1, static_cast<std::size_t>(
        dim_ == 1 ? static_cast<double>(m) : std::sqrt(static_cast<double>(m))));
    cell_ = (hi - lo) / static_cast<double>(cells_);
    if (!(cell_ > 0)) cell_ = 1.0;
    const std::size_t total = dim_ == 1 ? cells_ : cells_ * cells_;
    start_.assign(total + 1, 0);
    std::vector<std::size_t> bucket(m);
    for (std::size_t i = 0; i < m; ++i) {
      bucket[i] = cell_of(traj.point(i));
      ++start_[bucket[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
    items_.resize(m);
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < m; ++i) items_[fill[bucket[i]]++] = i;
  }

  double nearest(std::span<const double> q) const {
    double best = std::numeric_limits<double>::infinity();
    const long cq0 = coord_cell(q[0]);
    const long cq1 = dim_ == 2 ? coord_cell(q[1]) : 0;
    const long ncell = static_cast<long>(cells_);
    for (long ring = 0;; ++ring) {
      // Any point in a cell at Chebyshev ring distance > ring is at least
      // ring * cell_ away from q.
      if (std::sqrt(best) <= static_cast<double>(ring - 1) * cell_ && ring > 1) break;
      bool any_cell = false;
      const long r1 = dim_ == 2 ? ring : 0;
      for (long d0 = -ring; d0 <= ring; ++d0) {
        for (long d1 = -r1; d1 <= r1; ++d1) {
          if (std::max(std::abs(d0), std::abs(d1)) != ring) continue;
          const long c0 = cq0 + d0, c1 = cq1 + d1;
          if (c0 < 0 || c0 >= ncell || c1 < 0 || (dim_ == 2 && c1 >= ncell)) continue;
          any_cell = true;
          const std::size_t c = dim_ == 1 ? static_cast<std::size_t>(c0)
                                          : static_cast<std::size_t>(c0) * cells_ + static_cast<std::size_t>(c1);
          for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
            auto p = traj_.point(items_[k]);
            double d2 = 0;
            for (int d = 0; d < dim_; ++d) d2 += (p[d] - q[d]) * (p[d] - q[d]);
            best = std::min(best, d2);
          }
        }
      }
      if (!any_cell && ring > 2 * ncell) break;
    }
    return std::sqrt(best);
  }

 private:
  long coord_cell(double v) const {
    long c = static_cast<long>(std::floor((v - lo_) / cell_));
    return std::clamp<long>(c, 0, static_cast<long>(cells_) - 1);
  }
  std::size_t cell_of(std::span<const double> p) const {
    auto c0 = static_cast<std::size_t>(coord_cell(p[0]));
    if (dim_ == 1) return c0;
    return c0 * cells_ + static_cast<std::size_t>(coord_cell(p[1]));
  }

  const Trajectory& traj_;
  int dim_;
  double lo_ = 0, cell_ = 1;
  std::size_t cells_ = 1;
  std::vector<std::size_t> start_, items_;
};

}  // namespace

double covering_radius(const Trajectory& traj, std::size_t extent) {
  if (traj.size() == 0) throw ValidationError("covering_radius: empty trajectory");
  const double half = 0.5 * static_cast<double>(extent);
  double lo = -half, hi = half;
  for (double v : traj.points()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const PointIndex index(traj, lo, hi + 1e-9);
  const double step = 0.25;
  const auto probes = static_cast<std::size_t>(std::llround(2.0 * half / step)) + 1;
  const int dim = traj.dim();
  const std::size_t rows = dim == 1 ? 1 : probes;
  std::vector<double> row_max(rows, 0.0);
  parallel_for(rows, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      double m = 0;
      for (std::size_t c = 0; c < probes; ++c) {
        double q[2] = {-half + step * static_cast<double>(dim == 1 ? c : r),
                       -half + step * static_cast<double>(c)};
        m = std::max(m, index.nearest({q, static_cast<std::size_t>(dim)}));
      }
      row_max[r] = m;
    }
  });
  return *std::max_element(row_max.begin(), row_max.end());
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void save_trajectory(const Trajectory& traj, const std::string& path) {
  if (ends_with(path, ".raw")) {
    RawArray arr;
    arr.dtype = RawArray::DType::f64;
    arr.shape = {traj.size(), static_cast<std::size_t>(traj.dim())};
    arr.center_offset = {0, 0};
    arr.real = traj.points();
    arr.extra["label"] = traj.label();
    arr.extra["trajectory_hash"] = traj.hash();
    write_raw(path, arr);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << (traj.dim() == 1 ? "kx\n" : "kx,ky\n");
  char buf[64];
  for (std::size_t m = 0; m < traj.size(); ++m) {
    auto p = traj.point(m);
    for (int d = 0; d < traj.dim(); ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", p[d]);
      if (d) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

Trajectory load_trajectory(const std::string& path) {
  if (ends_with(path, ".raw")) {
    RawArray arr = read_raw(path);
    if (arr.dtype != RawArray::DType::f64 || arr.shape.size() != 2)
      throw IoError(path + ": trajectory arrays must be f64 with shape [M, dim]");
    const auto dim = static_cast<int>(arr.shape[1]);
    std::string label = arr.extra.value("label", std::string{});
    try {
      return Trajectory(dim, std::move(arr.real), label);
    } catch (const ValidationError& e) {
      throw IoError(path + ": " + e.what());
    }
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int dim = 0;
  if (line == "kx")
    dim = 1;
  else if (line == "kx,ky")
    dim = 2;
  else
    throw IoError(path + ": expected header 'kx' or 'kx,ky', got '" + line + "'");
  std::vector<double> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int fields = 0;
    const char* s = line.c_str();
    while (true) {
      char* end = nullptr;
      double v = std::strtod(s, &end);
      if (end == s) throw IoError(path + ":" + std::to_string(lineno) + ": malformed number");
      if (!std::isfinite(v))
        throw IoError(path + ":" + std::to_string(lineno) + ": non-finite coordinate");
      pts.push_back(v);
      ++fields;
      s = end;
      if (*s == ',') {
        ++s;
        continue;
      }
      if (*s != '\0') throw IoError(path + ":" + std::to_string(lineno) + ": malformed line");
      break;
    }
    if (fields != dim)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                    " columns, got " + std::to_string(fields));
  }
  if (pts.empty()) throw IoError(path + ": trajectory has no points");
  return Trajectory(dim, std::move(pts), "file:" + path);
}

}  // namespace spurs
