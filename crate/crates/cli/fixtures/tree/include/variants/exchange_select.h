#ifndef EXCHANGE_SELECT_H
#define EXCHANGE_SELECT_H

// XOR-mask partner selection through the group shuffle intrinsic.
#define EXCHANGE(value, step) select_from_group(value, lane_id() ^ (HALF_WIDTH + (step)))

static inline int partner_lane(int lane, int step) {
  return lane ^ (HALF_WIDTH + step);
}

#endif
