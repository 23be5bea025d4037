#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fractlab::kernels {

// Data-parallel inner loops shared by the regularity verifier, the pinned
// distance scans and the conical scans. Coordinates are grid units stored as
// doubles; with indices < 2^24 every squared distance dx^2+dy^2 is an
// integer below 2^49, exactly representable, so both implementations produce
// bit-identical integer results and can be equivalence-tested directly.
//
// level_hist: for a pin p and each point i, let D = |p - a_i|^2 (grid
// units^2) and find the largest k in [0, N-1] with D <= 4^(N-k) (the deepest
// dyadic ball scale B(p, 2^-k) still containing a_i; unit-scale radius
// 2^-k = 2^(N-k) grid units). hist[k] += 1, clamped to k = N-1 from above;
// points beyond distance 1 are dropped. Cumulative suffix sums of hist give
// |B(p, 2^-k) cap A| for every k in one pass.
//
// bin_bitmap: sets bit floor(|p - a_i|) (grid units, i.e. the index of the
// 2^-N distance cell) in a caller-provided bitmap. floor(sqrt(D)) is exact
// for D < 2^50 because sqrt is correctly rounded and consecutive squares are
// further apart than half an ulp there.
//
// count_within: number of points with D <= r2.
struct impl_t {
    const char* name;
    void (*level_hist)(double px, double py, const double* xs, const double* ys,
                       size_t n, int N, uint32_t* hist);
    void (*bin_bitmap)(double px, double py, const double* xs, const double* ys,
                       size_t n, uint64_t* bitmap);
    size_t (*count_within)(double px, double py, const double* xs, const double* ys,
                           size_t n, double r2);
};

// Portable reference implementation.
const impl_t& scalar();

// Best implementation for this machine: AVX2 when the CPU supports it and it
// was compiled in, unless FRACTLAB_FORCE_SCALAR=1 is set; scalar otherwise.
// Selected once, at first use.
const impl_t& active();

// nullptr when AVX2 was not compiled in or the CPU lacks it.
const impl_t* avx2_or_null();

// Number of set bits in words[0..words). Helper for bin_bitmap consumers.
size_t popcount(const std::vector<uint64_t>& bitmap);

}  // namespace fractlab::kernels
