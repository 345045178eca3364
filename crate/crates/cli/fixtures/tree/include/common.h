#ifndef COMMON_H
#define COMMON_H

#include "vec3.h"
#include "config_macros.h"

typedef unsigned int uint;

struct RunParams {
  float time_step;
  float gravity;
  uint steps;
};

#endif
