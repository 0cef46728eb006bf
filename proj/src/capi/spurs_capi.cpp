#include "spurs/spurs.h"

#include <cmath>
#include <cstring>
#include <mutex>
#include <string>

#include "json.hpp"
#include "spurs/engine.hpp"
#include "spurs/error.hpp"
#include "spurs/gridding.hpp"
#include "spurs/io.hpp"
#include "spurs/log.hpp"
#include "spurs/metrics.hpp"
#include "spurs/phantom.hpp"
#include "spurs/trajectory.hpp"

struct spurs_trajectory {
  spurs::Trajectory t;
};
struct spurs_phantom {
  spurs::Phantom p;
};
struct spurs_samples {
  spurs::SampleSet s;
};
struct spurs_plan {
  spurs::OfflinePlan p;
};
// An image (N^dim) or a coefficient grid (L^dim); extent is per dimension.
struct spurs_image {
  int dim = 2;
  std::size_t extent = 0;
  std::vector<spurs::cplx> v;
  bool kspace = false;
};

namespace {

thread_local std::string g_last_error;

spurs_status fail(spurs_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <class F>
spurs_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return SPURS_OK;
  } catch (const spurs::Error& e) {
    return fail(static_cast<spurs_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPURS_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPURS_E_INTERNAL, e.what());
  } catch (...) {
    return fail(SPURS_E_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw spurs::ValidationError(what);
}

void copy_hash(const std::string& h, char out[17]) {
  std::memset(out, 0, 17);
  std::memcpy(out, h.data(), std::min<std::size_t>(h.size(), 16));
}

spurs::ImageGrid as_grid(const spurs_image* img) {
  spurs::ImageGrid g;
  g.spec = spurs::GridSpec::make(img->dim, img->extent, 1.0);
  g.pixels = img->v;
  return g;
}

spurs_image* image_from(const spurs::ImageGrid& g) {
  auto* out = new spurs_image;
  out->dim = g.spec.dim;
  out->extent = g.spec.n;
  out->v = g.pixels;
  return out;
}

spurs_image* coeffs_from(const spurs::ComplexGrid& d) {
  auto* out = new spurs_image;
  out->dim = d.spec.dim;
  out->extent = d.spec.size;
  out->v = d.values;
  out->kspace = true;
  return out;
}

std::mutex g_log_mutex;
spurs_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;

}  // namespace

extern "C" {

const char* spurs_version(void) { return "1.0.0"; }

const char* spurs_last_error(void) { return g_last_error.c_str(); }

void spurs_set_log_callback(spurs_log_fn fn, void* user) {
  {
    std::lock_guard<std::mutex> lock(g_log_mutex);
    g_log_fn = fn;
    g_log_user = user;
  }
  if (!fn) {
    spurs::set_log_sink({});
    return;
  }
  spurs::set_log_sink([](spurs::LogLevel level, const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_log_mutex);
    if (g_log_fn) g_log_fn(static_cast<int>(level), msg.c_str(), g_log_user);
  });
}

spurs_status spurs_file_hash(const char* path, char out[17]) {
  return guarded([&] {
    require(path && out, "null argument");
    copy_hash(spurs::file_hash(path), out);
  });
}

spurs_status spurs_trajectory_radial(size_t n, size_t spokes, size_t bins, spurs_trajectory** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new spurs_trajectory{spurs::radial(n, spokes, bins)};
  });
}

spurs_status spurs_trajectory_spiral(size_t n, size_t m, spurs_trajectory** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new spurs_trajectory{spurs::spiral(n, m)};
  });
}

spurs_status spurs_trajectory_from_points(int dim, const double* points, size_t count,
                                          spurs_trajectory** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(dim == 1 || dim == 2, "trajectory dimension must be 1 or 2");
    require(points != nullptr || count == 0, "null point array");
    std::vector<double> p(points, points + count * static_cast<size_t>(dim));
    *out = new spurs_trajectory{spurs::Trajectory(dim, std::move(p))};
  });
}

spurs_status spurs_trajectory_load(const char* path, spurs_trajectory** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new spurs_trajectory{spurs::load_trajectory(path)};
  });
}

spurs_status spurs_trajectory_save(const spurs_trajectory* t, const char* path) {
  return guarded([&] {
    require(t && path, "null argument");
    spurs::save_trajectory(t->t, path);
  });
}

size_t spurs_trajectory_size(const spurs_trajectory* t) { return t ? t->t.size() : 0; }
int spurs_trajectory_dim(const spurs_trajectory* t) { return t ? t->t.dim() : 0; }
const double* spurs_trajectory_points(const spurs_trajectory* t) {
  return t ? t->t.points().data() : nullptr;
}

spurs_status spurs_trajectory_hash(const spurs_trajectory* t, char out[17]) {
  return guarded([&] {
    require(t && out, "null argument");
    copy_hash(t->t.hash(), out);
  });
}

spurs_status spurs_trajectory_covering_radius(const spurs_trajectory* t, size_t extent, double* out) {
  return guarded([&] {
    require(t && out, "null argument");
    *out = spurs::covering_radius(t->t, extent);
  });
}

void spurs_trajectory_free(spurs_trajectory* t) { delete t; }

spurs_status spurs_phantom_create(const char* name, spurs_phantom** out) {
  return guarded([&] {
    require(name && out, "null argument");
    if (std::strcmp(name, "empty") == 0) {
      *out = new spurs_phantom{};
    } else {
      *out = new spurs_phantom{spurs::phantom_by_name(name)};
    }
  });
}

spurs_status spurs_phantom_add_ellipse(spurs_phantom* p, double amplitude, double x0, double y0, double a,
                                       double b, double theta) {
  return guarded([&] {
    require(p != nullptr, "null phantom");
    require(a > 0 && b > 0, "ellipse semi-axes must be positive");
    require(std::isfinite(amplitude) && std::isfinite(x0) && std::isfinite(y0) && std::isfinite(theta),
            "ellipse parameters must be finite");
    p->p.ellipses.push_back({amplitude, x0, y0, a, b, theta});
  });
}

spurs_status spurs_phantom_kspace(const spurs_phantom* p, const spurs_trajectory* t, spurs_samples** out) {
  return guarded([&] {
    require(p && t && out, "null argument");
    *out = new spurs_samples{spurs::phantom_kspace(p->p, t->t)};
  });
}

spurs_status spurs_phantom_image(const spurs_phantom* p, size_t n, spurs_image** out) {
  return guarded([&] {
    require(p && out, "null argument");
    *out = image_from(spurs::phantom_image(p->p, n));
  });
}

void spurs_phantom_free(spurs_phantom* p) { delete p; }

spurs_status spurs_samples_from_data(const spurs_trajectory* t, const double* interleaved, size_t count,
                                     spurs_samples** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(interleaved != nullptr || count == 0, "null sample array");
    spurs::SampleSet s;
    if (t) {
      require(t->t.size() == count, "sample count does not match the trajectory");
      s.trajectory_hash = t->t.hash();
    }
    s.b.resize(count);
    for (size_t i = 0; i < count; ++i) s.b[i] = {interleaved[2 * i], interleaved[2 * i + 1]};
    *out = new spurs_samples{std::move(s)};
  });
}

spurs_status spurs_samples_add_noise(const spurs_samples* s, double isnr_db, uint64_t seed, spurs_samples** out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = new spurs_samples{spurs::add_noise(s->s, isnr_db, seed)};
  });
}

spurs_status spurs_samples_save(const spurs_samples* s, const char* path) {
  return guarded([&] {
    require(s && path, "null argument");
    spurs::save_samples(s->s, path);
  });
}

spurs_status spurs_samples_load(const char* path, spurs_samples** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new spurs_samples{spurs::load_samples(path)};
  });
}

size_t spurs_samples_size(const spurs_samples* s) { return s ? s->s.b.size() : 0; }

const double* spurs_samples_data(const spurs_samples* s) {
  return s ? reinterpret_cast<const double*>(s->s.b.data()) : nullptr;
}

void spurs_samples_trajectory_hash(const spurs_samples* s, char out[17]) {
  if (!out) return;
  copy_hash(s ? s->s.trajectory_hash : std::string(), out);
}

void spurs_samples_free(spurs_samples* s) { delete s; }

void spurs_config_init(spurs_config* c) {
  if (!c) return;
  spurs::ReconConfig d;
  c->n = 0;
  c->degree = d.degree;
  c->sigma = d.sigma;
  c->rho = 0.0;
  c->weights = nullptr;
  c->weight_count = 0;
  c->max_iter = d.max_iter;
  c->tol = d.tol;
  c->ordering = SPURS_ORDER_CONSTRAINED_AMD;
}

spurs_status spurs_plan_create(const spurs_trajectory* t, const spurs_config* c, spurs_plan** out) {
  return guarded([&] {
    require(t && c && out, "null argument");
    spurs::ReconConfig rc;
    rc.n = c->n;
    rc.degree = c->degree;
    rc.sigma = c->sigma;
    rc.rho = c->rho;
    rc.max_iter = c->max_iter;
    rc.tol = c->tol;
    switch (c->ordering) {
      case SPURS_ORDER_CONSTRAINED_AMD: rc.ordering = spurs::Ordering::constrained_amd; break;
      case SPURS_ORDER_AMD: rc.ordering = spurs::Ordering::amd; break;
      case SPURS_ORDER_NATURAL: rc.ordering = spurs::Ordering::natural; break;
      default: throw spurs::ValidationError("unknown ordering");
    }
    if (c->weights) rc.gamma_bar.assign(c->weights, c->weights + c->weight_count);
    *out = new spurs_plan{spurs::plan_offline(t->t, rc)};
  });
}

spurs_status spurs_plan_save(const spurs_plan* p, const char* path) {
  return guarded([&] {
    require(p && path, "null argument");
    spurs::save_plan(p->p, path);
  });
}

spurs_status spurs_plan_load(const char* path, spurs_plan** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new spurs_plan{spurs::load_plan(path)};
  });
}

spurs_status spurs_plan_info_get(const spurs_plan* p, spurs_plan_info* info) {
  return guarded([&] {
    require(p && info, "null argument");
    const auto& plan = p->p;
    const auto nnz = plan.nnz();
    info->dim = plan.grid.dim;
    info->n = plan.grid.n;
    info->grid_size = plan.grid.size;
    info->m = plan.m();
    info->degree = plan.kernel.degree;
    info->sigma = plan.grid.sigma();
    info->rho = plan.rho;
    info->nnz_phi = nnz.nnz_phi;
    info->nnz_psi = nnz.nnz_psi;
    info->nnz_lu = nnz.nnz_lu;
    info->fill_ratio = nnz.fill_ratio;
    copy_hash(plan.trajectory_hash, info->trajectory_hash);
  });
}

void spurs_plan_free(spurs_plan* p) { delete p; }

namespace {

void check_match(const spurs_plan* p, const spurs_samples* s) {
  require(p && s, "null argument");
  if (s->s.b.size() != p->p.m())
    throw spurs::ValidationError("sample count " + std::to_string(s->s.b.size()) + " does not match plan M " +
                                 std::to_string(p->p.m()));
  if (!s->s.trajectory_hash.empty() && s->s.trajectory_hash != p->p.trajectory_hash)
    throw spurs::ValidationError("samples were taken on trajectory " + s->s.trajectory_hash +
                                 " but the plan was built for " + p->p.trajectory_hash);
}

}  // namespace

spurs_status spurs_reconstruct(const spurs_plan* p, const spurs_samples* s, spurs_image** image,
                               spurs_image** coeffs) {
  return guarded([&] {
    check_match(p, s);
    require(image != nullptr, "null output handle");
    auto r = spurs::reconstruct_once(p->p, s->s.b);
    *image = image_from(r.image);
    if (coeffs) *coeffs = coeffs_from(r.d);
  });
}

spurs_status spurs_reconstruct_iterative(const spurs_plan* p, const spurs_samples* s, int max_iter, double tol,
                                         spurs_image** image, spurs_image** coeffs, double* history,
                                         size_t history_cap, size_t* history_len) {
  return guarded([&] {
    check_match(p, s);
    require(image != nullptr, "null output handle");
    require(max_iter >= 1, "max_iter must be at least 1");
    auto r = spurs::reconstruct_iterative(p->p, s->s.b, max_iter, tol);
    *image = image_from(r.result.image);
    if (coeffs) *coeffs = coeffs_from(r.result.d);
    if (history_len) *history_len = r.history.size();
    if (history) {
      for (size_t i = 0; i < r.history.size() && i < history_cap; ++i) history[i] = r.history[i].error_norm;
    }
  });
}

spurs_status spurs_gridding(const spurs_trajectory* t, const spurs_samples* s, size_t n, double width,
                            double sigma, spurs_density density, spurs_image** out) {
  return guarded([&] {
    require(t && s && out, "null argument");
    require(s->s.b.size() == t->t.size(), "sample count does not match the trajectory");
    if (!s->s.trajectory_hash.empty() && s->s.trajectory_hash != t->t.hash())
      throw spurs::ValidationError("samples do not belong to this trajectory");
    const auto spec = spurs::KaiserBesselSpec::make(width > 0 ? width : 12.0, sigma > 0 ? sigma : 2.0);
    const auto kind = density == SPURS_DENSITY_RADIAL ? spurs::DensityKind::radial : spurs::DensityKind::uniform;
    const auto w = spurs::density_weights(t->t, kind);
    *out = image_from(spurs::grid_reconstruct(t->t, s->s.b, n, spec, w));
  });
}

int spurs_image_dim(const spurs_image* img) { return img ? img->dim : 0; }
size_t spurs_image_extent(const spurs_image* img) { return img ? img->extent : 0; }
size_t spurs_image_count(const spurs_image* img) { return img ? img->v.size() : 0; }
const double* spurs_image_data(const spurs_image* img) {
  return img ? reinterpret_cast<const double*>(img->v.data()) : nullptr;
}

spurs_status spurs_image_save_raw(const spurs_image* img, const char* path) {
  return guarded([&] {
    require(img && path, "null argument");
    spurs::RawArray a;
    a.dtype = spurs::RawArray::DType::c128;
    a.shape.assign(static_cast<size_t>(img->dim), img->extent);
    a.center_offset.assign(static_cast<size_t>(img->dim), img->extent / 2);
    a.cplx_values = img->v;
    a.extra["kind"] = img->kspace ? "coefficients" : "image";
    spurs::write_raw(path, a);
  });
}

spurs_status spurs_image_load_raw(const char* path, spurs_image** out) {
  return guarded([&] {
    require(path && out, "null argument");
    auto a = spurs::read_raw(path);
    if (a.dtype != spurs::RawArray::DType::c128)
      throw spurs::IoError(std::string(path) + ": expected complex128 image data");
    if (a.shape.empty() || a.shape.size() > 2 || (a.shape.size() == 2 && a.shape[0] != a.shape[1]))
      throw spurs::IoError(std::string(path) + ": expected a 1D or square 2D array");
    auto* img = new spurs_image;
    img->dim = static_cast<int>(a.shape.size());
    img->extent = a.shape[0];
    img->v = std::move(a.cplx_values);
    img->kspace = a.extra.value("kind", std::string("image")) == "coefficients";
    *out = img;
  });
}

spurs_status spurs_image_save_pgm(const spurs_image* img, const char* path) {
  return guarded([&] {
    require(img && path, "null argument");
    const size_t rows = img->dim == 2 ? img->extent : 1;
    const auto [lo, hi] = spurs::write_pgm16(path, img->v, rows, img->extent);
    nlohmann::ordered_json j;
    j["format"] = "pgm16";
    j["quantity"] = "magnitude";
    j["min"] = lo;
    j["max"] = hi;
    j["maxval"] = 65535;
    j["value"] = "min + pixel / 65535 * (max - min)";
    spurs::write_text(std::string(path) + ".json", j.dump(2) + "\n");
  });
}

void spurs_image_free(spurs_image* img) { delete img; }

spurs_status spurs_snr(const spurs_image* truth, const spurs_image* recon, double* out_db) {
  return guarded([&] {
    require(truth && recon && out_db, "null argument");
    require(truth->dim == recon->dim && truth->extent == recon->extent, "image shapes differ");
    *out_db = spurs::snr_db(as_grid(truth), as_grid(recon));
  });
}

spurs_status spurs_mssim(const spurs_image* truth, const spurs_image* recon, double* out) {
  return guarded([&] {
    require(truth && recon && out, "null argument");
    require(truth->dim == recon->dim && truth->extent == recon->extent, "image shapes differ");
    *out = spurs::mssim(as_grid(truth), as_grid(recon)).mssim;
  });
}

}  // extern "C"
