#ifndef IO_CHECKPOINT_H
#define IO_CHECKPOINT_H

#include "io/formats.h"

int checkpoint_write(const char *path);
int checkpoint_read(const char *path);

#endif
