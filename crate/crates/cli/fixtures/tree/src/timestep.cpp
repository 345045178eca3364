#include "backend.h"
#include "tuning.h"
#include "sycl_shim.h"
#include "cuda_shim.h"
#include "hip_shim.h"

void advance_step(void *params) {
  update_geometry();
  update_corrections();
#if BACKEND == 1
  submit_queue_barrier();
#elif BACKEND == 2
  cuda_stream_sync();
#elif BACKEND == 3
  hip_stream_sync();
#endif
  update_energy();
}
