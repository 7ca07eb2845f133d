#include "jumpstop/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace jumpstop::kernels {

namespace {

const KernelTable* pick() {
    const char* env = std::getenv("JUMPSTOP_SIMD");
    bool want_scalar = env && std::strcmp(env, "scalar") == 0;
#if defined(JUMPSTOP_HAVE_AVX2)
    bool want_avx2 = env && std::strcmp(env, "avx2") == 0;
    bool cpu_ok = __builtin_cpu_supports("avx2");
    if (!want_scalar && (want_avx2 || cpu_ok)) {
        if (want_avx2 || cpu_ok) return &avx2_table;
    }
#endif
    (void)want_scalar;
    return &scalar_table;
}

}  // namespace

const KernelTable& active() {
    static const KernelTable* table = pick();
    return *table;
}

std::string active_name() { return active().name; }

}  // namespace jumpstop::kernels
