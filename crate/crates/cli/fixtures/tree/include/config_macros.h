#ifndef CONFIG_MACROS_H
#define CONFIG_MACROS_H

#define POLY_ORDER 5
#define BLOCK_SIZE 128
#define LEAF_CAPACITY 16

#endif
