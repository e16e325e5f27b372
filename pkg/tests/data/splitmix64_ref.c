/* Reference SplitMix64 used once to produce the golden draw files.
   cc -O2 -o ref splitmix64_ref.c && ./ref 0 16 > golden_seed_0.txt */
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

static uint64_t state;

static uint64_t next(void) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

int main(int argc, char **argv) {
    state = strtoull(argv[1], NULL, 0);
    int n = argc > 2 ? atoi(argv[2]) : 16;
    for (int i = 0; i < n; i++)
        printf("%.17g\n", (double)(next() >> 11) * 0x1.0p-53);
    return 0;
}
