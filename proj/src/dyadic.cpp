#include "fractlab/dyadic.hpp"

#include <bit>
#include <cmath>

namespace fractlab {

uint64_t morton_interleave(uint32_t x, uint32_t y) {
    auto spread = [](uint64_t v) {
        v = (v | (v << 16)) & 0x0000FFFF0000FFFFull;
        v = (v | (v << 8)) & 0x00FF00FF00FF00FFull;
        v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0Full;
        v = (v | (v << 2)) & 0x3333333333333333ull;
        v = (v | (v << 1)) & 0x5555555555555555ull;
        return v;
    };
    return (spread(x) << 1) | spread(y);
}

std::array<uint32_t, 2> morton_deinterleave(uint64_t code) {
    auto gather = [](uint64_t v) {
        v &= 0x5555555555555555ull;
        v = (v | (v >> 1)) & 0x3333333333333333ull;
        v = (v | (v >> 2)) & 0x0F0F0F0F0F0F0F0Full;
        v = (v | (v >> 4)) & 0x00FF00FF00FF00FFull;
        v = (v | (v >> 8)) & 0x0000FFFF0000FFFFull;
        v = (v | (v >> 16)) & 0x00000000FFFFFFFFull;
        return uint32_t(v);
    };
    return {gather(code >> 1), gather(code)};
}

double DyadicCube::side() const { return std::ldexp(1.0, -depth); }

Point DyadicCube::anchor() const {
    Point p;
    p.dim = dim;
    for (int i = 0; i < dim; ++i) p.v[i] = std::ldexp(double(index[i]), -depth);
    return p;
}

DyadicCube cell_of(const Point& x, int k) {
    require(x.dim == 1 || x.dim == 2, "cell_of: dimension must be 1 or 2");
    require(k >= 0, "cell_of: depth must be nonnegative");
    require(k <= 31, "cell_of: depth out of supported range");
    DyadicCube c;
    c.dim = x.dim;
    c.depth = k;
    for (int i = 0; i < x.dim; ++i) {
        double xi = x.v[i];
        require(xi >= 0.0 && xi < 1.0, "cell_of: coordinate outside [0,1)");
        // ldexp and floor are exact, so this is the true binary prefix of xi
        c.index[i] = uint32_t(std::floor(std::ldexp(xi, k)));
    }
    return c;
}

namespace {

// 52-bit integer expansion of a coordinate; exact for any double in [0,1).
uint64_t frac_bits52(double x) { return uint64_t(std::floor(std::ldexp(x, 52))); }

}  // namespace

double dyadic_distance(const Point& x, const Point& y) {
    require(x.dim == y.dim, "dyadic_distance: dimension mismatch");
    int shared = 52;  // deepest level at which all coordinates share a cell
    for (int i = 0; i < x.dim; ++i) {
        double xi = x.v[i], yi = y.v[i];
        require(xi >= 0.0 && xi < 1.0 && yi >= 0.0 && yi < 1.0,
                "dyadic_distance: coordinate outside [0,1)");
        uint64_t diff = frac_bits52(xi) ^ frac_bits52(yi);
        if (diff == 0) continue;
        int common = 52 - std::bit_width(diff);  // common binary prefix length
        shared = std::min(shared, common);
    }
    if (shared == 52 && x.v == y.v) return 0.0;  // rho(x,x) = 0 convention
    return std::ldexp(1.0, -shared);
}

Point doubling_map(const Point& x) {
    Point out = x;
    for (int i = 0; i < x.dim; ++i) {
        double t = 2.0 * x.v[i];  // exact
        out.v[i] = t >= 1.0 ? t - 1.0 : t;
    }
    return out;
}

}  // namespace fractlab
