#include "common.h"

void prefix_sum(int *values, int count) {
#pragma omp simd
  for (int i = 1; i < count; ++i) {
    values[i] += values[i - 1];
  }
}
