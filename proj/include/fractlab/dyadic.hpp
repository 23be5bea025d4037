#pragma once

#include <array>
#include <cstdint>

#include "fractlab/common.hpp"

namespace fractlab {

// A point of [0,1)^d. d=1 uses v[0] only. Coordinates are doubles, i.e.
// dyadic rationals with <=52 fractional bits; every operation below treats
// them exactly, so cell lookups and the doubling map never disagree.
struct Point {
    int dim = 2;
    std::array<double, 2> v{0.0, 0.0};
};

inline Point point1(double x) { return Point{1, {x, 0.0}}; }
inline Point point2(double x, double y) { return Point{2, {x, y}}; }

// --- Morton (bit-interleaved) cell codes -----------------------------------
//
// A depth-k cell with index (jx, jy) gets code interleave(jx, jy), x in the
// higher bit of each pair. Keying depth-N cells this way makes every coarse
// cell a contiguous code range: the depth-k ancestor of code c is
// c >> (d*(N-k)). d=1 codes are just the index.

uint64_t morton_interleave(uint32_t x, uint32_t y);
std::array<uint32_t, 2> morton_deinterleave(uint64_t code);

inline uint64_t morton_encode(int dim, uint32_t jx, uint32_t jy = 0) {
    return dim == 1 ? uint64_t(jx) : morton_interleave(jx, jy);
}

inline std::array<uint32_t, 2> morton_decode(int dim, uint64_t code) {
    return dim == 1 ? std::array<uint32_t, 2>{uint32_t(code), 0}
                    : morton_deinterleave(code);
}

// Half-open dyadic cube [j 2^-k, (j+1) 2^-k)^d at depth k.
struct DyadicCube {
    int dim = 2;
    int depth = 0;
    std::array<uint32_t, 2> index{0, 0};

    uint64_t code() const { return morton_encode(dim, index[0], index[1]); }
    double side() const;
    // left endpoint (the cell's anchor point)
    Point anchor() const;
};

// The unique depth-k cell containing x; index j_i = floor(x_i 2^k).
// Coordinates outside [0,1) are a domain error.
DyadicCube cell_of(const Point& x, int k);

// Dyadic metric rho(x,y) = 2^-l with l the deepest level sharing a cell;
// rho(x,x) = 0 by convention.
double dyadic_distance(const Point& x, const Point& y);

// Doubling map S(x) = 2x mod 1 applied coordinatewise (exact on doubles).
Point doubling_map(const Point& x);

}  // namespace fractlab
