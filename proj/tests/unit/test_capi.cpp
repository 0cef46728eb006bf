#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "spurs/spurs.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  auto p = fs::temp_directory_path() / (std::string("spurs_capi_") + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Logs {
  std::vector<std::string> lines;
};

void collect(int, const char* msg, void* user) { static_cast<Logs*>(user)->lines.emplace_back(msg); }

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::string(spurs_version()) == "1.0.0");
  spurs_trajectory* t = nullptr;
  CHECK(spurs_trajectory_radial(64, 0, 16, &t) == SPURS_E_VALIDATION);
  CHECK(t == nullptr);
  CHECK(std::string(spurs_last_error()).find("spokes") != std::string::npos);
  CHECK(spurs_trajectory_load("/nonexistent/x.csv", &t) == SPURS_E_IO);
  CHECK(spurs_trajectory_radial(64, 4, 16, nullptr) == SPURS_E_VALIDATION);
  // Free functions accept null.
  spurs_trajectory_free(nullptr);
  spurs_plan_free(nullptr);
  spurs_image_free(nullptr);
}

TEST_CASE("end to end through the C interface") {
  const auto dir = scratch("e2e");
  spurs_trajectory* t = nullptr;
  REQUIRE(spurs_trajectory_radial(32, 40, 64, &t) == SPURS_OK);
  CHECK(spurs_trajectory_size(t) == 2560);
  CHECK(spurs_trajectory_dim(t) == 2);
  char hash[17];
  REQUIRE(spurs_trajectory_hash(t, hash) == SPURS_OK);
  CHECK(std::strlen(hash) == 16);

  spurs_phantom* ph = nullptr;
  REQUIRE(spurs_phantom_create("shepp-logan", &ph) == SPURS_OK);
  spurs_samples* clean = nullptr;
  REQUIRE(spurs_phantom_kspace(ph, t, &clean) == SPURS_OK);
  char shash[17];
  spurs_samples_trajectory_hash(clean, shash);
  CHECK(std::string(shash) == hash);
  spurs_image* truth = nullptr;
  REQUIRE(spurs_phantom_image(ph, 32, &truth) == SPURS_OK);
  CHECK(spurs_image_count(truth) == 1024);

  spurs_config c;
  spurs_config_init(&c);
  c.n = 32;
  Logs logs;
  spurs_set_log_callback(collect, &logs);
  spurs_plan* plan = nullptr;
  REQUIRE(spurs_plan_create(t, &c, &plan) == SPURS_OK);
  CHECK(logs.lines.size() == 3);
  spurs_plan_info info;
  REQUIRE(spurs_plan_info_get(plan, &info) == SPURS_OK);
  CHECK(info.m == 2560);
  CHECK(info.grid_size == 64);
  CHECK(info.nnz_psi == 2 * info.nnz_phi + info.m + 64 * 64);
  CHECK(info.rho > 0);
  CHECK(std::string(info.trajectory_hash) == hash);

  const auto plan_path = (dir / "p.spursfac").string();
  REQUIRE(spurs_plan_save(plan, plan_path.c_str()) == SPURS_OK);
  logs.lines.clear();
  spurs_plan* loaded = nullptr;
  REQUIRE(spurs_plan_load(plan_path.c_str(), &loaded) == SPURS_OK);
  REQUIRE(logs.lines.size() == 1);
  CHECK(logs.lines[0].find("phase 1 skipped") != std::string::npos);
  spurs_set_log_callback(nullptr, nullptr);

  spurs_image *img = nullptr, *coeffs = nullptr;
  REQUIRE(spurs_reconstruct(loaded, clean, &img, &coeffs) == SPURS_OK);
  CHECK(spurs_image_extent(img) == 32);
  CHECK(spurs_image_extent(coeffs) == 64);
  double snr = 0, ssim = 0;
  REQUIRE(spurs_snr(truth, img, &snr) == SPURS_OK);
  REQUIRE(spurs_mssim(truth, img, &ssim) == SPURS_OK);
  CHECK(snr > 5);
  CHECK(ssim > 0.3);
  CHECK(spurs_snr(truth, coeffs, &snr) == SPURS_E_VALIDATION);

  double hist[8];
  std::size_t len = 0;
  spurs_image* it = nullptr;
  REQUIRE(spurs_reconstruct_iterative(loaded, clean, 4, 0.0, &it, nullptr, hist, 8, &len) == SPURS_OK);
  CHECK(len == 4);
  for (std::size_t i = 1; i < len; ++i) CHECK(hist[i] <= hist[i - 1] * (1 + 1e-12));

  spurs_image* grid = nullptr;
  REQUIRE(spurs_gridding(t, clean, 32, 0, 0, SPURS_DENSITY_RADIAL, &grid) == SPURS_OK);
  CHECK(spurs_image_count(grid) == 1024);

  const auto raw = (dir / "img.raw").string();
  REQUIRE(spurs_image_save_raw(img, raw.c_str()) == SPURS_OK);
  spurs_image* back = nullptr;
  REQUIRE(spurs_image_load_raw(raw.c_str(), &back) == SPURS_OK);
  CHECK(std::memcmp(spurs_image_data(back), spurs_image_data(img), 1024 * 16) == 0);
  REQUIRE(spurs_image_save_pgm(img, (dir / "img.pgm").c_str()) == SPURS_OK);
  CHECK(fs::exists(dir / "img.pgm.json"));

  // Samples from another trajectory are rejected by hash.
  spurs_trajectory* other = nullptr;
  REQUIRE(spurs_trajectory_spiral(32, 2560, &other) == SPURS_OK);
  spurs_samples* wrong = nullptr;
  REQUIRE(spurs_phantom_kspace(ph, other, &wrong) == SPURS_OK);
  spurs_image* bad = nullptr;
  CHECK(spurs_reconstruct(loaded, wrong, &bad, nullptr) == SPURS_E_VALIDATION);
  CHECK(bad == nullptr);

  // Corruption is an I/O class error.
  {
    FILE* f = std::fopen(plan_path.c_str(), "r+b");
    std::fseek(f, 300, SEEK_SET);
    std::fputc(0x42, f);
    std::fclose(f);
  }
  spurs_plan* corrupt = nullptr;
  CHECK(spurs_plan_load(plan_path.c_str(), &corrupt) == SPURS_E_IO);
  CHECK(std::string(spurs_last_error()).find("checksum") != std::string::npos);

  for (auto* i : {img, coeffs, it, grid, back, truth}) spurs_image_free(i);
  spurs_samples_free(clean);
  spurs_samples_free(wrong);
  spurs_plan_free(plan);
  spurs_plan_free(loaded);
  spurs_phantom_free(ph);
  spurs_trajectory_free(t);
  spurs_trajectory_free(other);
}

TEST_CASE("custom phantoms, raw samples and noise") {
  spurs_phantom* ph = nullptr;
  REQUIRE(spurs_phantom_create("empty", &ph) == SPURS_OK);
  REQUIRE(spurs_phantom_add_ellipse(ph, 1.0, 0, 0, 0.25, 0.25, 0) == SPURS_OK);
  CHECK(spurs_phantom_add_ellipse(ph, 1.0, 0, 0, -1, 0.25, 0) == SPURS_E_VALIDATION);
  const double pts[] = {0.0, 0.0, 1.0, 2.0};
  spurs_trajectory* t = nullptr;
  REQUIRE(spurs_trajectory_from_points(2, pts, 2, &t) == SPURS_OK);
  spurs_samples* s = nullptr;
  REQUIRE(spurs_phantom_kspace(ph, t, &s) == SPURS_OK);
  CHECK(spurs_samples_data(s)[0] == doctest::Approx(M_PI / 16));

  spurs_samples *n1 = nullptr, *n2 = nullptr, *same = nullptr;
  REQUIRE(spurs_samples_add_noise(s, 20, 5, &n1) == SPURS_OK);
  REQUIRE(spurs_samples_add_noise(s, 20, 5, &n2) == SPURS_OK);
  REQUIRE(spurs_samples_add_noise(s, INFINITY, 5, &same) == SPURS_OK);
  CHECK(std::memcmp(spurs_samples_data(n1), spurs_samples_data(n2), 32) == 0);
  CHECK(std::memcmp(spurs_samples_data(same), spurs_samples_data(s), 32) == 0);

  const double vals[] = {1, 2, 3, 4};
  spurs_samples* raw = nullptr;
  REQUIRE(spurs_samples_from_data(t, vals, 2, &raw) == SPURS_OK);
  CHECK(spurs_samples_from_data(t, vals, 1, &raw) == SPURS_E_VALIDATION);
  for (auto* x : {s, n1, n2, same, raw}) spurs_samples_free(x);
  spurs_trajectory_free(t);
  spurs_phantom_free(ph);
}
