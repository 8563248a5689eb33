#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sketchavg {

// Honor SKETCHAVG_THREADS if set; otherwise leave the OpenMP default alone.
// Called once at program startup by the CLI and test drivers.
inline void apply_thread_env() {
#ifdef _OPENMP
    const char* s = std::getenv("SKETCHAVG_THREADS");
    if (!s || !*s) return;
    int n = std::atoi(s);
    if (n >= 1) omp_set_num_threads(n);
#endif
}

}  // namespace sketchavg
