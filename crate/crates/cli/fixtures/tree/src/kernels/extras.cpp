#include "common.h"
#include "exchange.h"
#include "tuning.h"

void update_extras(void) {
  evaluate_density_gradients();
  evaluate_state_gradients();
#if SUBGROUP_SIZE == 16
  compact_extras_registers();
#endif
}
