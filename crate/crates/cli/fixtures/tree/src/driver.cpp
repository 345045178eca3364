#include "common.h"
#include "particle.h"

#ifdef ENABLE_IO
#include "io/checkpoint.h"
#endif

void run_simulation(RunParams *params) {
  for (uint s = 0; s < params->steps; ++s) {
    advance_step(params);
#ifdef ENABLE_IO
    checkpoint_write("step.bin");
#endif
  }
}

#if 0
void legacy_entry(void) {
  run_with_defaults();
}
#endif
