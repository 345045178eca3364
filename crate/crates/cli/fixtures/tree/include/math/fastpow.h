#ifndef MATH_FASTPOW_H
#define MATH_FASTPOW_H

// Reduced-precision power for the native instruction set.
static inline float fast_powr(float base, float exp) {
  return native_exp2(exp * native_log2(base));
}

#endif
