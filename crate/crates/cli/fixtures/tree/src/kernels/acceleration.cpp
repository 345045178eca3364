#include "common.h"
#include "exchange.h"

void update_acceleration(void) {
  momentum_derivative_pass();
#if defined(USE_CUDA) && SUBGROUP_SIZE >= 32
  acceleration_warp_reduce();
#endif
#if defined(USE_CUDA) || defined(USE_HIP)
  acceleration_fast_atomics();
#endif
  apply_momentum_update();
}
