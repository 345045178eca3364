#ifndef DEPRECATED_H
#define DEPRECATED_H

/* Retained for reference; superseded by exchange.h. */
#define OLD_EXCHANGE(value, lane) shuffle_sync(value, lane)

int legacy_lane_map(int lane);

#endif
