/* SPURS non-uniform resampling library: C interface.
 *
 * All objects are opaque handles released with their *_free function.
 * Functions return a spurs_status; on failure spurs_last_error() returns a
 * thread-local message describing the most recent error.
 *
 * Complex arrays are interleaved (re, im) doubles. Grids are row-major with
 * dimension 0 outermost; index i maps to logical index i - extent/2.
 */
#ifndef SPURS_SPURS_H
#define SPURS_SPURS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SPURS_BUILDING)
#    define SPURS_API __declspec(dllexport)
#  else
#    define SPURS_API __declspec(dllimport)
#  endif
#else
#  define SPURS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spurs_status {
  SPURS_OK = 0,
  SPURS_E_INTERNAL = 1,
  SPURS_E_VALIDATION = 2,
  SPURS_E_NUMERICAL = 3,
  SPURS_E_IO = 4
} spurs_status;

typedef struct spurs_trajectory spurs_trajectory;
typedef struct spurs_phantom spurs_phantom;
typedef struct spurs_samples spurs_samples;
typedef struct spurs_plan spurs_plan;
typedef struct spurs_image spurs_image;

SPURS_API const char* spurs_version(void);
SPURS_API const char* spurs_last_error(void);

/* level: 0 debug, 1 info, 2 warning. Pass NULL to disable logging. */
typedef void (*spurs_log_fn)(int level, const char* message, void* user);
SPURS_API void spurs_set_log_callback(spurs_log_fn fn, void* user);

/* FNV-1a 64 of a file's bytes as 16 hex digits plus NUL. */
SPURS_API spurs_status spurs_file_hash(const char* path, char out[17]);

/* ---- trajectories ---- */
SPURS_API spurs_status spurs_trajectory_radial(size_t n, size_t spokes, size_t bins, spurs_trajectory** out);
SPURS_API spurs_status spurs_trajectory_spiral(size_t n, size_t m, spurs_trajectory** out);
/* points: count * dim doubles, point-major. */
SPURS_API spurs_status spurs_trajectory_from_points(int dim, const double* points, size_t count,
                                                    spurs_trajectory** out);
/* CSV ("kx[,ky]" header) or raw+JSON when the path ends in ".raw". */
SPURS_API spurs_status spurs_trajectory_load(const char* path, spurs_trajectory** out);
SPURS_API spurs_status spurs_trajectory_save(const spurs_trajectory* t, const char* path);
SPURS_API size_t spurs_trajectory_size(const spurs_trajectory* t);
SPURS_API int spurs_trajectory_dim(const spurs_trajectory* t);
SPURS_API const double* spurs_trajectory_points(const spurs_trajectory* t);
SPURS_API spurs_status spurs_trajectory_hash(const spurs_trajectory* t, char out[17]);
SPURS_API spurs_status spurs_trajectory_covering_radius(const spurs_trajectory* t, size_t extent, double* out);
SPURS_API void spurs_trajectory_free(spurs_trajectory* t);

/* ---- phantoms and samples ---- */
/* name: "shepp-logan", "modified-shepp-logan" or "empty". */
SPURS_API spurs_status spurs_phantom_create(const char* name, spurs_phantom** out);
SPURS_API spurs_status spurs_phantom_add_ellipse(spurs_phantom* p, double amplitude, double x0, double y0,
                                                 double a, double b, double theta);
SPURS_API spurs_status spurs_phantom_kspace(const spurs_phantom* p, const spurs_trajectory* t,
                                            spurs_samples** out);
SPURS_API spurs_status spurs_phantom_image(const spurs_phantom* p, size_t n, spurs_image** out);
SPURS_API void spurs_phantom_free(spurs_phantom* p);

SPURS_API spurs_status spurs_samples_from_data(const spurs_trajectory* t, const double* interleaved, size_t count,
                                               spurs_samples** out);
/* isnr_db = INFINITY copies the samples unchanged. */
SPURS_API spurs_status spurs_samples_add_noise(const spurs_samples* s, double isnr_db, uint64_t seed,
                                               spurs_samples** out);
SPURS_API spurs_status spurs_samples_save(const spurs_samples* s, const char* path);
SPURS_API spurs_status spurs_samples_load(const char* path, spurs_samples** out);
SPURS_API size_t spurs_samples_size(const spurs_samples* s);
SPURS_API const double* spurs_samples_data(const spurs_samples* s);
/* Writes 16 hex digits plus NUL; empty string when unknown. */
SPURS_API void spurs_samples_trajectory_hash(const spurs_samples* s, char out[17]);
SPURS_API void spurs_samples_free(spurs_samples* s);

/* ---- offline plan ---- */
typedef enum spurs_ordering {
  SPURS_ORDER_CONSTRAINED_AMD = 0,
  SPURS_ORDER_AMD = 1,
  SPURS_ORDER_NATURAL = 2
} spurs_ordering;

typedef struct spurs_config {
  size_t n;               /* base grid points per dimension (even) */
  int degree;             /* B-spline degree p */
  double sigma;           /* grid oversampling, sigma * n even */
  double rho;             /* regularization; <= 0 selects the default */
  const double* weights;  /* per-sample weights, NULL for identity */
  size_t weight_count;
  int max_iter;
  double tol;
  spurs_ordering ordering;
} spurs_config;

SPURS_API void spurs_config_init(spurs_config* c);

typedef struct spurs_plan_info {
  int dim;
  size_t n;
  size_t grid_size;       /* sigma * n */
  size_t m;
  int degree;
  double sigma;
  double rho;
  size_t nnz_phi;
  size_t nnz_psi;
  size_t nnz_lu;
  double fill_ratio;
  char trajectory_hash[17];
} spurs_plan_info;

SPURS_API spurs_status spurs_plan_create(const spurs_trajectory* t, const spurs_config* c, spurs_plan** out);
SPURS_API spurs_status spurs_plan_save(const spurs_plan* p, const char* path);
SPURS_API spurs_status spurs_plan_load(const char* path, spurs_plan** out);
SPURS_API spurs_status spurs_plan_info_get(const spurs_plan* p, spurs_plan_info* info);
SPURS_API void spurs_plan_free(spurs_plan* p);

/* ---- reconstruction ---- */
/* image receives the N^dim image; coeffs (optional) the (sigma N)^dim grid. */
SPURS_API spurs_status spurs_reconstruct(const spurs_plan* p, const spurs_samples* s, spurs_image** image,
                                         spurs_image** coeffs);
/* history receives |eps_p| per iterate (up to history_cap entries). */
SPURS_API spurs_status spurs_reconstruct_iterative(const spurs_plan* p, const spurs_samples* s, int max_iter,
                                                   double tol, spurs_image** image, spurs_image** coeffs,
                                                   double* history, size_t history_cap, size_t* history_len);

typedef enum spurs_density { SPURS_DENSITY_RADIAL = 0, SPURS_DENSITY_UNIFORM = 1 } spurs_density;

/* Kaiser-Bessel gridding; width <= 0 or sigma <= 0 select 12 and 2. */
SPURS_API spurs_status spurs_gridding(const spurs_trajectory* t, const spurs_samples* s, size_t n, double width,
                                      double sigma, spurs_density density, spurs_image** out);

/* ---- images ---- */
SPURS_API int spurs_image_dim(const spurs_image* img);
SPURS_API size_t spurs_image_extent(const spurs_image* img);
SPURS_API size_t spurs_image_count(const spurs_image* img);
SPURS_API const double* spurs_image_data(const spurs_image* img);
SPURS_API spurs_status spurs_image_save_raw(const spurs_image* img, const char* path);
SPURS_API spurs_status spurs_image_load_raw(const char* path, spurs_image** out);
/* 16-bit magnitude PGM, min-max scaled; the scale goes to path + ".json". */
SPURS_API spurs_status spurs_image_save_pgm(const spurs_image* img, const char* path);
SPURS_API void spurs_image_free(spurs_image* img);

/* ---- metrics ---- */
SPURS_API spurs_status spurs_snr(const spurs_image* truth, const spurs_image* recon, double* out_db);
SPURS_API spurs_status spurs_mssim(const spurs_image* truth, const spurs_image* recon, double* out);

#ifdef __cplusplus
}
#endif

#endif /* SPURS_SPURS_H */
