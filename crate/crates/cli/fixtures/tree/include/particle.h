#ifndef PARTICLE_H
#define PARTICLE_H

#include "vec3.h"

struct Particle {
  Vec3 pos;
  Vec3 vel;
  float mass;
  float energy;
};

#endif
