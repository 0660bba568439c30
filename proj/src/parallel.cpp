#include "dcu/parallel.hpp"

#include <cstdlib>
#include <omp.h>

namespace dcu::par {

namespace {
int resolve_initial() {
    if (const char* env = std::getenv("DCU_THREADS")) {
        const int k = std::atoi(env);
        if (k > 0) return k;
    }
    return 0; // 0 = leave OpenMP default alone
}
int g_threads = -1; // -1 = not yet resolved
} // namespace

void set_thread_count(int k) {
    if (k > 0) {
        g_threads = k;
        omp_set_num_threads(k);
    }
}

int thread_count() {
    if (g_threads == -1) {
        const int k = resolve_initial();
        g_threads = k;
        if (k > 0) omp_set_num_threads(k);
    }
    return g_threads > 0 ? g_threads : omp_get_max_threads();
}

} // namespace dcu::par
