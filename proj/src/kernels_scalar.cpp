#include <bit>
#include <cmath>

#include "fractlab/kernels.hpp"

namespace fractlab::kernels {

namespace {

// ceil(log2 D) for an integer-valued positive double, via the exponent bits;
// this is what the AVX2 path computes lane-wise, so the two stay identical.
inline int ceil_log2(double d) {
    uint64_t bits = std::bit_cast<uint64_t>(d);
    int e = int((bits >> 52) & 0x7FF) - 1023;
    uint64_t mantissa = bits & ((uint64_t(1) << 52) - 1);
    return e + (mantissa != 0 ? 1 : 0);
}

void level_hist_scalar(double px, double py, const double* xs, const double* ys,
                       size_t n, int N, uint32_t* hist) {
    for (size_t i = 0; i < n; ++i) {
        double dx = xs[i] - px, dy = ys[i] - py;
        double d2 = dx * dx + dy * dy;
        int k;
        if (d2 == 0.0) {
            k = N - 1;  // the pin itself sits inside every ball
        } else {
            // D <= 4^(N-k)  <=>  k <= N - ceil(log2 D)/2
            int t = 2 * N - ceil_log2(d2);
            if (t < 0) continue;  // farther than distance 1
            k = t >> 1;
            if (k > N - 1) k = N - 1;
        }
        hist[k] += 1;
    }
}

void bin_bitmap_scalar(double px, double py, const double* xs, const double* ys,
                       size_t n, uint64_t* bitmap) {
    for (size_t i = 0; i < n; ++i) {
        double dx = xs[i] - px, dy = ys[i] - py;
        uint64_t v = uint64_t(std::sqrt(dx * dx + dy * dy));
        bitmap[v >> 6] |= uint64_t(1) << (v & 63);
    }
}

size_t count_within_scalar(double px, double py, const double* xs, const double* ys,
                           size_t n, double r2) {
    size_t count = 0;
    for (size_t i = 0; i < n; ++i) {
        double dx = xs[i] - px, dy = ys[i] - py;
        count += (dx * dx + dy * dy <= r2) ? 1 : 0;
    }
    return count;
}

}  // namespace

const impl_t& scalar() {
    static const impl_t impl{"scalar", level_hist_scalar, bin_bitmap_scalar,
                             count_within_scalar};
    return impl;
}

}  // namespace fractlab::kernels
