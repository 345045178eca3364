#ifndef MATH_CLAMP_H
#define MATH_CLAMP_H

static inline float clampf(float v, float lo, float hi) {
  if (v < lo) return lo;
  if (v > hi) return hi;
  return v;
}

#endif
