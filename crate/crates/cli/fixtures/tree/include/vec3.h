#ifndef VEC3_H
#define VEC3_H

// Minimal position/velocity triple used by all backends.
struct Vec3 {
  float x;
  float y;
  float z;
};

static inline float dot3(const Vec3 a, const Vec3 b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

#endif
