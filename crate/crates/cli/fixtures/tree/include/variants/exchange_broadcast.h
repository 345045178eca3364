#ifndef EXCHANGE_BROADCAST_H
#define EXCHANGE_BROADCAST_H

// Known-index broadcast; partner values are recomputed, not exchanged.
#define EXCHANGE(value, step) group_broadcast(value, HALF_WIDTH + (step))

static inline int broadcast_source(int step) {
  return HALF_WIDTH + step;
}

#endif
