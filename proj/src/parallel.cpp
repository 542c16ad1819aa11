#include "alphasens/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace alphasens::parallel {

namespace {

int env_thread_cap() {
    const char* raw = std::getenv("ALPHASENS_THREADS");
    if (raw == nullptr) return 0;
    try {
        const int v = std::stoi(raw);
        return v > 0 ? v : 0;
    } catch (...) {
        return 0;
    }
}

}  // namespace

int worker_count() {
    const int cap = env_thread_cap();
    const int hw = omp_get_max_threads();
    if (cap == 0) return hw;
    return cap < hw ? cap : hw;
}

void apply_thread_env() {
    const int cap = env_thread_cap();
    if (cap > 0) omp_set_num_threads(cap);
}

}  // namespace alphasens::parallel
