#pragma once

#include <optional>
#include <vector>

#include "spurs/grid.hpp"

namespace spurs {

// 10 log10(mean f^2 / mean (|g| - |f|)^2); +infinity when g equals f.
double snr_db(const ImageGrid& f, const ImageGrid& g);

struct SsimResult {
  double mssim = 0;
  std::vector<double> map;   // valid region, row-major
  std::size_t rows = 0, cols = 0;
};

// Mean SSIM of magnitudes with an 11-tap Gaussian window (sigma 1.5) per
// dimension, c1 = (0.01 L)^2, c2 = (0.03 L)^2. L defaults to max(f) - min(f)
// (1 if that is zero). The map covers positions where the window fits.
SsimResult mssim(const ImageGrid& f, const ImageGrid& g, std::optional<double> dynamic_range = {});

}  // namespace spurs
