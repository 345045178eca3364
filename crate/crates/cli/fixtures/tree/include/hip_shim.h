#ifndef HIP_SHIM_H
#define HIP_SHIM_H

#ifdef USE_HIP
#define DEVICE_FN __device__
#define LAUNCH(kernel) hipLaunchKernelGGL(kernel, grid, block, 0, 0)

static inline int wave_id(int thread) {
  return thread / 64;
}
#endif

#endif
