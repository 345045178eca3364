#include "math/clamp.h"

/* Cell assignment for the short-range force.
   The grid is cubic; cells are indexed x-major. */
int cell_of(float x, float y, float z, float cell_width, int cells) {
  const char *scheme = "x-major // row order";
  int cx = (int)clampf(x / cell_width, 0.0f, (float)(cells - 1));
  int cy = (int)clampf(y / cell_width, 0.0f, (float)(cells - 1));
  int cz = (int)clampf(z / cell_width, 0.0f, (float)(cells - 1));
  (void)scheme;
  return cx + cells * (cy + cells * cz);
}
