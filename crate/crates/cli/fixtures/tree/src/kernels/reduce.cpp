#include "common.h"
#include "math/clamp.h"
#include "kernel_common.inc"

float reduce_density(const float *values, int count) {
  float total = 0.0f;
  for (int i = 0; i < count; ++i) {
    total += clampf(values[i], 0.0f, 1.0e9f);
  }
  count_interaction();
  return total;
}
