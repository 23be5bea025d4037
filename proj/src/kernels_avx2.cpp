// AVX2 variants of the distance kernels. This translation unit is the only
// one built with -mavx2; it must not be entered unless cpuid reports AVX2
// (the dispatcher in kernels.cpp guarantees that).
#ifdef FRACTLAB_BUILD_AVX2

#include <immintrin.h>

#include <cmath>

#include "fractlab/kernels.hpp"

namespace fractlab::kernels {

namespace {

// lane-wise ceil(log2 d) for integer-valued positive doubles, from the
// exponent/mantissa bits — mirrors ceil_log2 in kernels_scalar.cpp
inline __m256i ceil_log2_pd(__m256d d) {
    __m256i bits = _mm256_castpd_si256(d);
    __m256i exp = _mm256_sub_epi64(
        _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7FF)),
        _mm256_set1_epi64x(1023));
    __m256i mantissa = _mm256_and_si256(bits, _mm256_set1_epi64x((int64_t(1) << 52) - 1));
    // add 1 where the mantissa is nonzero (not an exact power of two)
    __m256i is_pow2 = _mm256_cmpeq_epi64(mantissa, _mm256_setzero_si256());
    __m256i nonpow2 = _mm256_xor_si256(is_pow2, _mm256_set1_epi64x(-1));
    return _mm256_sub_epi64(exp, nonpow2);  // mask is -1 exactly on non-powers
}

void level_hist_avx2(double px, double py, const double* xs, const double* ys,
                     size_t n, int N, uint32_t* hist) {
    const __m256d vpx = _mm256_set1_pd(px), vpy = _mm256_set1_pd(py);
    size_t i = 0;
    alignas(32) int64_t lanes[4];
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vpx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vpy);
        __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        __m256i t = _mm256_sub_epi64(_mm256_set1_epi64x(2 * N), ceil_log2_pd(d2));
        _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), t);
        // d2 == 0 needs no special case: its exponent field makes t huge and
        // the clamp lands it in bucket N-1, same as the scalar path
        for (int lane = 0; lane < 4; ++lane) {
            int64_t tl = lanes[lane];
            if (tl < 0) continue;
            int k = int(tl >> 1);
            if (k > N - 1) k = N - 1;
            hist[k] += 1;
        }
    }
    if (i < n) scalar().level_hist(px, py, xs + i, ys + i, n - i, N, hist);
}

void bin_bitmap_avx2(double px, double py, const double* xs, const double* ys,
                     size_t n, uint64_t* bitmap) {
    const __m256d vpx = _mm256_set1_pd(px), vpy = _mm256_set1_pd(py);
    size_t i = 0;
    alignas(32) double roots[4];
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vpx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vpy);
        __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        _mm256_store_pd(roots, _mm256_sqrt_pd(d2));
        for (int lane = 0; lane < 4; ++lane) {
            uint64_t v = uint64_t(roots[lane]);
            bitmap[v >> 6] |= uint64_t(1) << (v & 63);
        }
    }
    if (i < n) scalar().bin_bitmap(px, py, xs + i, ys + i, n - i, bitmap);
}

size_t count_within_avx2(double px, double py, const double* xs, const double* ys,
                         size_t n, double r2) {
    const __m256d vpx = _mm256_set1_pd(px), vpy = _mm256_set1_pd(py);
    const __m256d vr2 = _mm256_set1_pd(r2);
    size_t count = 0;
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vpx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vpy);
        __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        int mask = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
        count += size_t(__builtin_popcount(unsigned(mask)));
    }
    if (i < n) count += scalar().count_within(px, py, xs + i, ys + i, n - i, r2);
    return count;
}

}  // namespace

const impl_t* avx2_or_null_impl();  // forward declared for kernels.cpp

const impl_t* avx2_or_null_impl() {
    static const impl_t impl{"avx2", level_hist_avx2, bin_bitmap_avx2,
                             count_within_avx2};
    return &impl;
}

}  // namespace fractlab::kernels

#endif  // FRACTLAB_BUILD_AVX2
