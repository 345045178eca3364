#ifndef LEAF_H
#define LEAF_H

#include "particle.h"

struct Leaf {
  Particle *items;
  int count;
};

#endif
