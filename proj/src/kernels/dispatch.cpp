#include <string>

#include "rsb/core/error.hpp"
#include "rsb/kernels/kernels.hpp"

namespace rsb::kern {

namespace {

const KernelTable& pick_best() {
#if defined(__x86_64__)
    if (avx2_available()) return avx2_table();
#endif
    return scalar_table();
}

const KernelTable* g_active = nullptr;

} // namespace

const KernelTable& active() {
    if (!g_active) g_active = &pick_best();
    return *g_active;
}

void force_backend(std::string_view name) {
    if (name == "auto") {
        g_active = &pick_best();
        return;
    }
    if (name == "scalar") {
        g_active = &scalar_table();
        return;
    }
#if defined(__x86_64__)
    if (name == "avx2") {
        if (!avx2_available()) throw Error("avx2 kernels not supported on this CPU");
        g_active = &avx2_table();
        return;
    }
#endif
    throw Error("unknown kernel backend '" + std::string(name) + "'");
}

} // namespace rsb::kern
