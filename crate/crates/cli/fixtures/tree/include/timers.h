#pragma once

struct TimerSlot {
  double start;
  double total;
  long calls;
};

void timer_begin(struct TimerSlot *slot);
void timer_end(struct TimerSlot *slot);
