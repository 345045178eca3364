#ifndef SYCL_SHIM_H
#define SYCL_SHIM_H

#ifdef USE_SYCL
#include "math/fastpow.h"

#define DEVICE_FN inline
#define LAUNCH(kernel) submit_functor(kernel)

static inline int subgroup_id(int item) {
  return item / SUBGROUP_SIZE;
}
#endif

#endif
