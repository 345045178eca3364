#include "common.h"
#include "energy_tables.h"

#define LOCAL_ACCUM 1

void update_energy(void) {
#ifdef LOCAL_ACCUM
  energy_accumulate_local();
#endif
  energy_apply(energy_weights);
}

#undef LOCAL_ACCUM

void finalize_energy(void) {
#ifdef LOCAL_ACCUM
  energy_accumulate_local();
#else
  energy_accumulate_global();
#endif
}
