#ifndef TUNING_H
#define TUNING_H

/* Register-pressure tuning per sub-group width. */
#if SUBGROUP_SIZE == 16
#define REGISTERS_PER_ITEM 16
#define UNROLL_FACTOR 4
#elif SUBGROUP_SIZE == 32
#define REGISTERS_PER_ITEM 8
#define UNROLL_FACTOR 2
#elif SUBGROUP_SIZE == 64
#define REGISTERS_PER_ITEM 4
#define UNROLL_FACTOR 1
#endif

#if SUBGROUP_SIZE * 2 >= 64
#define WIDE_SUBGROUP 1
#endif

#endif
