#ifndef IO_FORMATS_H
#define IO_FORMATS_H

#define CHECKPOINT_MAGIC 0x48414343
#define CHECKPOINT_VERSION 3

#endif
