#include "ftscert/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace ftscert::kernels {

static const Ops* pick() {
    const char* env = std::getenv("FTSCERT_KERNEL");
    if (env) {
        if (std::strcmp(env, "scalar") == 0) return &ref::ops;
        if (std::strcmp(env, "avx2") == 0 && avx2::compiled() && avx2::supported())
            return &avx2::ops;
        // Unknown or unusable request: fall through to auto-detect.
    }
    if (avx2::compiled() && avx2::supported()) return &avx2::ops;
    return &ref::ops;
}

const Ops& active() {
    static const Ops* chosen = pick();
    return *chosen;
}

}  // namespace ftscert::kernels
