#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fractlab/dyadic.hpp"

namespace fractlab {

// A finite set of depth-N grid points (cell indices) in [0, 2^N)^d — the
// discrete set A. Stored as sorted unique Morton codes, which makes the set
// canonical for roundtrips and turns coarse-cell queries into code ranges.
struct GridSet {
    int dim = 2;
    int scale = 0;  // N
    std::vector<uint64_t> codes;

    // Validates, sorts, and rejects duplicates (one point per cell).
    static GridSet make(int dim, int scale, std::vector<uint64_t> codes);

    size_t size() const { return codes.size(); }

    std::array<uint32_t, 2> point(size_t i) const {
        return morton_decode(dim, codes[i]);
    }

    // The i-th point in unit coordinates (index * 2^-N, exact).
    Point unit_point(size_t i) const;

    // Point coordinates in grid units as doubles (exact: indices < 2^26),
    // the layout the distance kernels consume. ys is all-zero for d=1.
    void coordinates(std::vector<double>& xs, std::vector<double>& ys) const;

    bool contains(uint64_t code) const;

    bool operator==(const GridSet&) const = default;
};

}  // namespace fractlab
