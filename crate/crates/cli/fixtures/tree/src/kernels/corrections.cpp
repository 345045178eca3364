#include "common.h"
#include "exchange.h"

void update_corrections(void) {
  accumulate_kernel_sums();
#if BACKEND == 1
  correction_pass_device();
#if SUBGROUP_SIZE == 16
  correction_pass_butterfly();
#endif
#else
  correction_pass_shuffle();
#endif
  normalize_corrections();
}
