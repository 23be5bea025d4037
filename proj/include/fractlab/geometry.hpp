#pragma once

#include <optional>

#include "fractlab/gridset.hpp"
#include "fractlab/scenery.hpp"

namespace fractlab {

// Unit vector on S^1, stored as an angle in [0, 2pi).
struct Direction {
    double theta = 0.0;

    static Direction from_angle(double t);
    double cx() const;
    double cy() const;
};

// |v - v'| (Euclidean chord between the unit vectors).
double chord_distance(const Direction& a, const Direction& b);

// sigma(x,y) = (x-y)/|x-y|. x = y is a degenerate-pair error.
Direction direction(const Point& x, const Point& y);

// H_q of the pushforward of eta under t = v . (cell center), binned on
// the 1-D dyadic grid {[m 2^-q, (m+1) 2^-q)} over [-sqrt(2), sqrt(2)].
// Returned normalized by q (range [0, (q+1)/q]).
double projected_entropy(const DyadicMeasure& eta, const Direction& v, int q);

// |H_q(Pi_v eta) - H_q(Pi_v' eta)|; requires the chord |v - v'| <= 2^-q.
double direction_continuity_check(const DyadicMeasure& eta, const Direction& v,
                                  const Direction& v2, int q);

// Empirical E_q(v): the scenery-weighted mean of min(H_q(Pi_v .), 1).
double expected_projected_entropy(const SceneryDistribution& scn, const Direction& v,
                                  int q);

// Number of distinct cells floor(|x-y| 2^N) over y in A (1-D grid cells of
// width 2^-N starting at 0); x in unit coordinates.
uint64_t pinned_distance_count(const Point& x, const GridSet& A);

struct PinPolicy {
    bool all = true;       // scan all pins when |A|^2 <= 4e9, else auto-sample
    uint64_t sample_n = 0;  // explicit sample size (0 = default 16384)
    uint64_t seed = 1;
};

struct PinnedScanResult {
    double threshold = 0.0;  // 2^(tN)
    uint64_t exceptional = 0;
    std::vector<size_t> pins;       // indices into A, ascending
    std::vector<uint64_t> counts;   // pinned count per scanned pin
    std::vector<std::pair<uint64_t, uint64_t>> histogram;  // (count, #pins)
    bool sampled = false;
    uint64_t sample_seed = 0;
};

// Scans pins of A and counts those with pinned count strictly below 2^(tN).
PinnedScanResult pinned_scan(const GridSet& A, double t, PinPolicy policy = {});

// Number of distinct cells floor(|x-y| 2^N) over (x,y) in A x B. Scales and
// dimensions must match.
uint64_t distance_set_count(const GridSet& A, const GridSet& B);

// Normalized entropy H_{N'} of the pushforward of mu under y -> |x-y|/2,
// binned on depth-N' dyadic cells of [0,1); masses sit at cell centers.
double half_distance_entropy(const Point& x, const DyadicMeasure& mu, int N_prime);

// Two-sided cone with apex a, opening beta (half-angle of each nappe) and
// axis direction v. Membership: acute angle between the line through (y-a)
// and the line through v is strictly below beta.
struct Cone {
    Point apex;
    double beta = 0.0;  // in (0, pi/2)
    Direction dir;
};

bool in_cone(const Cone& c, const Point& y);

// x is well surrounded in B iff every direction's beta-cone at x contains a
// point of B at distance >= r_min: equivalently, the maximal circular gap of
// the qualifying direction angles mod pi is < 2 beta. r_min = 0 admits every
// y != x.
bool well_surrounded(const Point& x, const GridSet& B, double beta, double r_min);

// Definitional check on a 2^-grid_log2-fine direction grid over [0, pi):
// for every grid v, some qualifying y lies in the beta-cone at v. Test
// oracle for the angular-gap criterion.
bool well_surrounded_grid_check(const Point& x, const GridSet& B, double beta,
                                double r_min, int grid_log2 = 12);

struct ConicalScanResult {
    size_t total = 0;
    std::vector<uint64_t> exceptional_codes;  // points that are NOT well surrounded
    double fraction = 0.0;                    // |E| / |B|
    std::optional<double> cardinality_bound;  // 2^((1-kappa) s N) when s,kappa given
    bool within_bound = true;
};

ConicalScanResult exceptional_set(const GridSet& B, double beta, double r_min,
                                  std::optional<double> s = std::nullopt,
                                  std::optional<double> kappa = std::nullopt);

}  // namespace fractlab
