#pragma once

#include "fractlab/measure.hpp"

namespace fractlab {

struct SceneryAtom {
    DyadicMeasure view;  // depth = q_view, total mass 1
    double weight;
};

// Empirical scenery <mu>_[A,B) (or <mu,x>_[A,B)): a weighted collection of
// depth-q_view views of minicube measures. Identical views are merged
// (masses compared after quantization to 2^-30, the documented equality
// granularity), so the atom weights are exactly what integrating H_q needs.
struct SceneryDistribution {
    int q_view = 1;
    int depth_lo = 0, depth_hi = 0;  // provenance: the interval [A,B)
    std::vector<SceneryAtom> atoms;

    double total_weight() const;
};

// CP magnification: (mu, x) -> (mu^{x,1}, 2x mod 1).
std::pair<DyadicMeasure, Point> magnify(const DyadicMeasure& mu, const Point& x);

// <mu,x>_[A,B): uniform weights 1/(B-A) on truncations of mu^{x,n},
// n = A..B-1. Requires B <= N - q_view (every view keeps q_view levels) and
// mu(D_{B-1}(x)) > 0.
SceneryDistribution point_scenery(const DyadicMeasure& mu, const Point& x, int A,
                                  int B, int q_view);

// <mu>_[A,B): atoms are truncated mu^Q over positive-mass Q at depths
// A..B-1, weight mu(Q)/(B-A).
SceneryDistribution measure_scenery(const DyadicMeasure& mu, int A, int B,
                                    int q_view);

// H_{N'}(mu) - integral of H_q over <mu>_[0,N'). The local-global lemma
// bounds |gap| by c_d q/N'.
double local_global_gap(const DyadicMeasure& mu, int N_prime, int q);

struct RichnessVerdict {
    int N_prime = 0;
    int q = 0;
    double delta = 0.0;
    double defect_mass = 0.0;  // scenery weight of {H_q < s - delta}
    bool is_rich = false;      // defect < delta
};

// s-richness of mu at resolution (N', q, delta): strict comparisons exactly
// as defined.
RichnessVerdict richness(const DyadicMeasure& mu, int N_prime, int q, double delta,
                         double s);

struct WeakRegularityRow {
    double delta;
    int q;
    int best_N_prime;  // largest N' <= N - q at which mu is s-rich; 0 if none
};

// Finite-scale diagnostic for weak s-regularity over a (delta, q) grid.
std::vector<WeakRegularityRow> weak_regularity_profile(
    const DyadicMeasure& mu, double s, const std::vector<double>& delta_grid,
    const std::vector<int>& q_grid);

}  // namespace fractlab
