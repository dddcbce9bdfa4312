#include "harqlink/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace harqlink::kernels {

namespace {

const char* g_variant = "scalar";

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

void apply(const char* name) {
    if (std::strcmp(name, "scalar") == 0) {
        philox_fill = &scalar::philox_fill;
        sum_squares = &scalar::sum_squares;
        g_variant = "scalar";
        return;
    }
    if (std::strcmp(name, "avx2") == 0) {
        if (!cpu_has_avx2()) {
            throw std::runtime_error("kernel variant avx2 not supported on this CPU");
        }
        philox_fill = &avx2::philox_fill;
        sum_squares = &avx2::sum_squares;
        g_variant = "avx2";
        return;
    }
    throw std::invalid_argument(std::string("unknown kernel variant: ") + name);
}

const char* pick_default() {
    const char* env = std::getenv("HARQLINK_KERNEL");
    if (env != nullptr && env[0] != '\0') {
        return env;
    }
    return cpu_has_avx2() ? "avx2" : "scalar";
}

int init_dispatch() {
    try {
        apply(pick_default());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "harqlink: %s, using scalar kernels\n", e.what());
        apply("scalar");
    }
    return 0;
}

}  // namespace

PhiloxFillFn philox_fill = &scalar::philox_fill;
SumSquaresFn sum_squares = &scalar::sum_squares;

namespace {
const int g_init = init_dispatch();
}

bool avx2_supported() {
    return cpu_has_avx2();
}

const char* active_variant() {
    return g_variant;
}

void set_variant(const char* name) {
    apply(name);
}

}  // namespace harqlink::kernels
