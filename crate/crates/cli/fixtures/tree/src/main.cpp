#include "common.h"
#include "backend.h"
#include "timers.h"

static RunParams params;

int main(int argc, char **argv) {
  params.time_step = 0.05f;
  params.gravity = 1.0f;
  params.steps = 5;
#ifndef NDEBUG
  validate_arguments(argc, argv);
#endif
  run_simulation(&params);
  return 0;
}
