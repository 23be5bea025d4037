#include "doctest.h"

#include <cmath>
#include <cstring>
#include <set>

#include "fractlab/common.hpp"
#include "fractlab/kernels.hpp"

using namespace fractlab;

namespace {

struct cloud_t {
    std::vector<double> xs, ys;
};

cloud_t random_cloud(rng64& rng, size_t n, int N) {
    cloud_t c;
    const uint64_t side = uint64_t(1) << N;
    for (size_t i = 0; i < n; ++i) {
        c.xs.push_back(double(rng.below(side)));
        c.ys.push_back(double(rng.below(side)));
    }
    return c;
}

// straight-line reimplementation of the level histogram contract
void naive_level_hist(double px, double py, const cloud_t& c, int N,
                      std::vector<uint32_t>& hist) {
    hist.assign(size_t(N), 0);
    for (size_t i = 0; i < c.xs.size(); ++i) {
        const double dx = px - c.xs[i], dy = py - c.ys[i];
        const double d2 = dx * dx + dy * dy;
        int best = -1;
        for (int k = 0; k < N; ++k) {
            const double radius = std::ldexp(1.0, N - k);  // 2^-k in grid units
            if (d2 <= radius * radius) best = k;            // deepest wins
        }
        if (best >= 0) hist[size_t(best)] += 1;
    }
}

}  // namespace

TEST_CASE("level_hist matches a naive oracle") {
    rng64 rng(41);
    const int N = 8;
    for (size_t n : {size_t(1), size_t(7), size_t(64), size_t(333)}) {
        auto c = random_cloud(rng, n, N);
        const double px = double(rng.below(1u << N));
        const double py = double(rng.below(1u << N));
        std::vector<uint32_t> expect;
        naive_level_hist(px, py, c, N, expect);
        std::vector<uint32_t> got(size_t(N), 0);
        kernels::scalar().level_hist(px, py, c.xs.data(), c.ys.data(), n, N,
                                     got.data());
        CHECK(got == expect);
    }
}

TEST_CASE("bin_bitmap marks exact floor distances") {
    // pin at origin; points at distances 0, 3, 5 grid units
    cloud_t c;
    c.xs = {0.0, 3.0, 3.0, 4.0};
    c.ys = {0.0, 0.0, 4.0, 3.0};
    std::vector<uint64_t> bitmap(4, 0);
    kernels::scalar().bin_bitmap(0.0, 0.0, c.xs.data(), c.ys.data(), c.xs.size(),
                                 bitmap.data());
    CHECK((bitmap[0] & 1) != 0);          // |..| = 0
    CHECK((bitmap[0] & (1u << 3)) != 0);  // 3 and 5
    CHECK((bitmap[0] & (1u << 5)) != 0);
    CHECK(kernels::popcount(bitmap) == 3);
}

TEST_CASE("count_within matches a naive count") {
    rng64 rng(42);
    auto c = random_cloud(rng, 500, 10);
    const double px = 512.0, py = 300.0;
    for (double r2 : {0.0, 100.0, 5000.0, 4e6}) {
        size_t expect = 0;
        for (size_t i = 0; i < c.xs.size(); ++i) {
            const double dx = px - c.xs[i], dy = py - c.ys[i];
            if (dx * dx + dy * dy <= r2) ++expect;
        }
        CHECK(kernels::scalar().count_within(px, py, c.xs.data(), c.ys.data(),
                                             c.xs.size(), r2) == expect);
    }
}

TEST_CASE("vector and scalar kernels are bit-identical") {
    const kernels::impl_t* vec = kernels::avx2_or_null();
    if (vec == nullptr) {
        MESSAGE("AVX2 unavailable; equivalence covered by the scalar-only path");
        return;
    }
    rng64 rng(43);
    const int N = 12;
    for (size_t n : {size_t(1), size_t(2), size_t(3), size_t(4), size_t(5),
                     size_t(8), size_t(13), size_t(64), size_t(1000),
                     size_t(4097)}) {
        auto c = random_cloud(rng, n, N);
        const double px = double(rng.below(1u << N));
        const double py = double(rng.below(1u << N));

        std::vector<uint32_t> h1(size_t(N), 0), h2(size_t(N), 0);
        kernels::scalar().level_hist(px, py, c.xs.data(), c.ys.data(), n, N,
                                     h1.data());
        vec->level_hist(px, py, c.xs.data(), c.ys.data(), n, N, h2.data());
        CHECK(h1 == h2);

        const size_t words = (size_t(1) << N) / 32 + 2;
        std::vector<uint64_t> b1(words, 0), b2(words, 0);
        kernels::scalar().bin_bitmap(px, py, c.xs.data(), c.ys.data(), n, b1.data());
        vec->bin_bitmap(px, py, c.xs.data(), c.ys.data(), n, b2.data());
        CHECK(b1 == b2);

        for (double r2 : {10.0, 77777.0, 1e7}) {
            CHECK(kernels::scalar().count_within(px, py, c.xs.data(), c.ys.data(), n,
                                                 r2) ==
                  vec->count_within(px, py, c.xs.data(), c.ys.data(), n, r2));
        }
    }
}

TEST_CASE("active kernel produces scalar results") {
    rng64 rng(44);
    auto c = random_cloud(rng, 257, 9);
    std::vector<uint32_t> h1(9, 0), h2(9, 0);
    kernels::scalar().level_hist(3.0, 5.0, c.xs.data(), c.ys.data(), c.xs.size(), 9,
                                 h1.data());
    kernels::active().level_hist(3.0, 5.0, c.xs.data(), c.ys.data(), c.xs.size(), 9,
                                 h2.data());
    CHECK(h1 == h2);
}
