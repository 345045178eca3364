#ifndef OLD_TUNING_H
#define OLD_TUNING_H

#define OLD_BLOCK 256

#endif
