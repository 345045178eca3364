#include "common.h"
#include "leaf.h"
#include "exchange.h"
#include "kernel_common.inc"

// Volume estimation over leaf pairs with the half-warp layout.
void update_geometry(void) {
  for (int step = 0; step < HALF_WIDTH; ++step) {
#if BACKEND == 1
    geometry_pair_memory(step);
#elif BACKEND == 2
    geometry_pair_select(step);
#else
    geometry_pair_wave(step);
#endif
    count_interaction();
  }
}
