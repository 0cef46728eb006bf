/* The public header compiles as C99 and the library links from C. */
#include <math.h>
#include <stdio.h>

#include "spurs/spurs.h"

int main(void) {
  spurs_trajectory* t = NULL;
  spurs_phantom* ph = NULL;
  spurs_samples* s = NULL;
  spurs_plan* plan = NULL;
  spurs_image *img = NULL, *truth = NULL;
  spurs_config c;
  double snr = 0.0;

  if (spurs_trajectory_spiral(16, 400, &t) != SPURS_OK) goto fail;
  if (spurs_phantom_create("modified-shepp-logan", &ph) != SPURS_OK) goto fail;
  if (spurs_phantom_kspace(ph, t, &s) != SPURS_OK) goto fail;
  if (spurs_phantom_image(ph, 16, &truth) != SPURS_OK) goto fail;
  spurs_config_init(&c);
  c.n = 16;
  c.degree = 1;
  if (spurs_plan_create(t, &c, &plan) != SPURS_OK) goto fail;
  if (spurs_reconstruct(plan, s, &img, NULL) != SPURS_OK) goto fail;
  if (spurs_snr(truth, img, &snr) != SPURS_OK || !(snr > 0.0)) goto fail;
  if (spurs_trajectory_spiral(16, 0, &t) != SPURS_E_VALIDATION) goto fail;
  printf("c smoke ok: snr %.2f dB\n", snr);
  spurs_image_free(img);
  spurs_image_free(truth);
  spurs_plan_free(plan);
  spurs_samples_free(s);
  spurs_phantom_free(ph);
  spurs_trajectory_free(t);
  return 0;
fail:
  fprintf(stderr, "failure: %s\n", spurs_last_error());
  return 1;
}
