#include "common.h"

static int log_level = 1;

void log_message(const char *text) {
  if (log_level > 0) {
    emit_line(text);
  }
}
