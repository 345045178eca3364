/* Pre-migration kernel, kept for the archive. */
#include "old_tuning.h"

void old_update_geometry(void) {
  for (int i = 0; i < 32; ++i) {
    old_pair_interaction(i);
  }
}
