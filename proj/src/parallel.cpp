#include "bgsa/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bgsa {

unsigned default_thread_count() {
    if (const char* env = std::getenv("BGSA_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return 1;
}

}  // namespace bgsa
