#ifndef EXCHANGE_H
#define EXCHANGE_H

#include "backend.h"

#if BACKEND == 1
#include "variants/exchange_memory.h"
#if SUBGROUP_SIZE == 16
#include "variants/exchange_visa.h"
#endif
#elif BACKEND == 2 || BACKEND == 3
#include "variants/exchange_select.h"
#endif

#define HALF_WIDTH (SUBGROUP_SIZE / 2)

#endif
