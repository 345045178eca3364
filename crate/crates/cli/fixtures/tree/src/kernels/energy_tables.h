#ifndef ENERGY_TABLES_H
#define ENERGY_TABLES_H

static const float energy_weights[4] = {0.25f, 0.5f, 0.75f, 1.0f};

#endif
