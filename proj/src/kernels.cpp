#include "fractlab/kernels.hpp"

#include <bit>
#include <cstdlib>

namespace fractlab::kernels {

#ifdef FRACTLAB_BUILD_AVX2
const impl_t* avx2_or_null_impl();
#endif

const impl_t* avx2_or_null() {
#ifdef FRACTLAB_BUILD_AVX2
    static const impl_t* impl = []() -> const impl_t* {
        if (!__builtin_cpu_supports("avx2")) return nullptr;
        return avx2_or_null_impl();
    }();
    return impl;
#else
    return nullptr;
#endif
}

const impl_t& active() {
    static const impl_t* impl = [] {
        const char* force = std::getenv("FRACTLAB_FORCE_SCALAR");
        if (force && force[0] == '1') return &scalar();
        const impl_t* vec = avx2_or_null();
        return vec ? vec : &scalar();
    }();
    return *impl;
}

size_t popcount(const std::vector<uint64_t>& bitmap) {
    size_t total = 0;
    for (uint64_t w : bitmap) total += size_t(std::popcount(w));
    return total;
}

}  // namespace fractlab::kernels
