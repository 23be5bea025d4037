#pragma once

#include <utility>
#include <vector>

#include "fractlab/dyadic.hpp"

namespace fractlab {

// A probability measure on the depth-N dyadic grid of [0,1)^d, stored as a
// sparse list of (Morton code, mass) for the positive-mass depth-N cells,
// sorted by code. Coarse-cell masses are prefix aggregations, so every
// depth-k cell is a contiguous code range and never needs a second index.
//
// Immutable after construction by convention; all operations return copies.
struct DyadicMeasure {
    int dim = 1;
    int depth = 0;  // N
    std::vector<std::pair<uint64_t, double>> cells;

    // Validates codes/masses, sorts, drops zero masses, rejects duplicates,
    // and normalizes total mass to 1 (input total must be positive).
    static DyadicMeasure make(int dim, int depth,
                              std::vector<std::pair<uint64_t, double>> cells);

    size_t support_size() const { return cells.size(); }
    double total_mass() const;

    // Sum of masses over the depth-k cell with the given depth-k code.
    double cell_mass(int k, uint64_t code_at_k) const;

    // Depth-k aggregation (k <= N), sorted by depth-k code.
    std::vector<std::pair<uint64_t, double>> coarsen(int k) const;

    // Restriction to the union of the given cubes, renormalized to mass 1.
    // Zero mass on the union is an error.
    DyadicMeasure restrict_normalize(const std::vector<DyadicCube>& cubes) const;

    // The minicube measure mu^{x,n}: restrict to D_n(x), normalize, rescale
    // to the unit cube. Result has depth N-n. Requires n <= N-1 (depth
    // budget) and mu(D_n(x)) > 0.
    DyadicMeasure minicube(const Point& x, int n) const;

    // Same zoom-in keyed by the depth-n cell directly (used by sceneries,
    // where cells are enumerated rather than hit by points).
    DyadicMeasure minicube_at(uint64_t code_at_n, int n) const;

    bool operator==(const DyadicMeasure&) const = default;
};

// Uniform measure on the full depth-N grid (2^(dN) cells; keep N small).
DyadicMeasure uniform_measure(int dim, int depth);

// Point mass: all mass in the depth-N cell containing x.
DyadicMeasure point_mass(const Point& x, int depth);

// Product Bernoulli measure on the full depth-N grid: each level splits mass
// (p_i : 1-p_i) on coordinate i. px/py in (0,1); py ignored for d=1.
DyadicMeasure bernoulli_product(int dim, int depth, double px, double py = 0.5);

}  // namespace fractlab
