#ifndef BACKEND_H
#define BACKEND_H

#if defined(USE_SYCL)
#define BACKEND 1
#elif defined(USE_CUDA)
#define BACKEND 2
#elif defined(USE_HIP)
#define BACKEND 3
#else
#define BACKEND 0
#endif

#endif
