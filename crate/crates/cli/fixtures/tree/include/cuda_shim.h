#ifndef CUDA_SHIM_H
#define CUDA_SHIM_H

#ifdef USE_CUDA
#define DEVICE_FN __device__
#define LAUNCH(kernel) kernel<<<grid, block>>>()

static inline int warp_id(int thread) {
  return thread / 32;
}
#endif

#endif
