#pragma once

#include <optional>

#include "fractlab/gridset.hpp"
#include "fractlab/measure.hpp"

namespace fractlab {

// Self-similar generator data: iterate the kept depth-b cells L times;
// N = b*L, |A| = kept^L, implied dimension s = log2(kept)/b.
struct PatternSpec {
    int dim = 2;
    int block_depth = 1;                       // b
    std::vector<std::array<uint32_t, 2>> kept;  // depth-b cell indices
    int levels = 1;                            // L

    int scale() const { return block_depth * levels; }
    double implied_s() const;
};

GridSet generate_pattern_set(const PatternSpec& spec);

// The product set {(i 2^-(N/2), j 2^-N)} with 0 <= i < 2^(N/2)-1 and
// 0 <= j < 2^(N/2), as grid indices at scale 2^-N. N even, N >= 4.
GridSet generate_katz_tao(int N);

// Top-down random subdivision with per-node child counts in
// {floor(2^s), ceil(2^s)}, steered so the cumulative cell count stays inside
// [2^(sk)/C_target, C_target 2^(sk)] at every depth. Deterministic in seed.
GridSet generate_random_regular(int N, double s, double C_target, uint64_t seed,
                                int dim = 2);

// mu^A: equal mass 1/|A| on each occupied depth-N cell.
DyadicMeasure set_to_measure(const GridSet& A);

// A^mu: left endpoints of the positive-mass depth-N cells.
GridSet measure_to_set(const DyadicMeasure& mu);

struct RegularityReport {
    double s = 0.0;
    bool fitted = false;  // true when s came from the least-squares fit
    double C_star = 1.0;

    struct per_k_t {
        int k;
        uint64_t min_count;
        uint64_t max_count;
        double C_k;
    };
    std::vector<per_k_t> per_k;

    std::array<uint32_t, 2> worst_point{0, 0};
    int worst_k = 0;
    bool worst_upper = true;  // which bound the witness violates hardest

    bool sampled = false;
    uint64_t sample_size = 0;
    uint64_t sample_seed = 0;
};

// Verifies the discrete (s,C)-Ahlfors regularity bounds
//   C^-1 2^((N-k)s) <= |B(x, 2^-k) cap A| <= C 2^((N-k)s)
// over x in A (all points when |A| <= sample_threshold, else a seeded
// sample) and k in {0..N-1}, with closed Euclidean balls and exact integer
// distance classification. s absent => fitted by OLS on log2 mean counts
// over k in [2, N-2]. Reports the minimal C satisfying both bounds.
RegularityReport regularity_constant(const GridSet& A,
                                     std::optional<double> s = std::nullopt,
                                     size_t sample_threshold = 200000,
                                     uint64_t sample_seed = 1);

// Naive O(|A|^2 N) oracle with independent integer arithmetic; test/
// acceptance reference for regularity_constant (always scans all points).
RegularityReport regularity_constant_naive(const GridSet& A,
                                           std::optional<double> s = std::nullopt);

}  // namespace fractlab
