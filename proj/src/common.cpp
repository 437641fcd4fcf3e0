#include "smemsynth/common.hpp"

#include <cstdlib>
#include <thread>

namespace smemsynth {

unsigned worker_threads() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0)
        n = 1;
    if (const char* env = std::getenv("SMEMSYNTH_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1 && static_cast<unsigned long>(cap) < n)
            n = static_cast<unsigned>(cap);
    }
    return n;
}

} // namespace smemsynth
