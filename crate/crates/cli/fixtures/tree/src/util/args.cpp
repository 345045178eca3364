#include "common.h"

void validate_arguments(int argc, char **argv) {
  if (argc > 1) {
    parse_overrides(argc, argv);
  }
}

#if 0
static void print_usage(void) {
  emit_line("usage: nbody [options]");
}
#endif
