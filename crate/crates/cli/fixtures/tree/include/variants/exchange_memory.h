#ifndef EXCHANGE_MEMORY_H
#define EXCHANGE_MEMORY_H

// Same permutation as the shuffle form, carried through local memory.
#define EXCHANGE(value, step) local_exchange(value, lane_id() ^ (HALF_WIDTH + (step)))

static inline void local_exchange_barrier(void) {
  subgroup_barrier();
}

#endif
