#ifndef EXCHANGE_VISA_H
#define EXCHANGE_VISA_H

// Butterfly shuffle lowered to four mov instructions via inline assembly.
#define EXCHANGE_BUTTERFLY(value, step) visa_butterfly_mov4(value, step)

static inline int butterfly_partner(int lane, int step) {
  return (lane + step) % HALF_WIDTH + HALF_WIDTH;
}

#endif
