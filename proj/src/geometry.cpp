#include "fractlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_map>

#include "fractlab/entropy.hpp"
#include "fractlab/kernels.hpp"

namespace fractlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double t) {
    t = std::fmod(t, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    if (t >= 2.0 * kPi) t = 0.0;
    return t;
}

// Angle of the LINE spanned by (dx, dy), in [0, pi).
double line_angle(double dx, double dy) {
    double a = std::atan2(dy, dx);
    if (a < 0.0) a += kPi;
    if (a >= kPi) a -= kPi;
    return a;
}

// Circular distance on the line space R/pi.
double line_gap(double a, double b) {
    double d = std::fabs(a - b);
    return std::min(d, kPi - d);
}

// Number of 64-bit words needed for a distance bitmap at scale N
// (bins run up to floor(sqrt(2) * 2^N)).
size_t bitmap_words(int scale) {
    uint64_t max_bin = uint64_t(std::ldexp(std::sqrt(2.0), scale)) + 1;
    return size_t(max_bin / 64 + 2);
}

void check_beta(double beta) {
    require(beta > 0.0 && beta < kPi / 2.0, "cone opening must lie in (0, pi/2)");
}

// Angles mod pi of directions from x to qualifying points of B
// (|x - y| >= r_min and y != x), sorted ascending.
std::vector<double> qualifying_angles(const Point& x, const GridSet& B, double r_min) {
    require(B.dim == 2, "surroundedness needs a planar set");
    require(r_min >= 0.0, "r_min must be nonnegative");
    const double px = std::ldexp(x.v[0], B.scale);
    const double py = std::ldexp(x.v[1], B.scale);
    const double rg = std::ldexp(r_min, B.scale);
    const double rg2 = rg * rg;
    std::vector<double> xs, ys;
    B.coordinates(xs, ys);
    std::vector<double> angles;
    angles.reserve(B.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - px;
        const double dy = ys[i] - py;
        const double d2 = dx * dx + dy * dy;
        if (d2 <= 0.0 || d2 < rg2) continue;
        angles.push_back(line_angle(dx, dy));
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

}  // namespace

Direction Direction::from_angle(double t) {
    require(std::isfinite(t), "direction angle must be finite");
    return Direction{wrap_angle(t)};
}

double Direction::cx() const { return std::cos(theta); }
double Direction::cy() const { return std::sin(theta); }

double chord_distance(const Direction& a, const Direction& b) {
    const double dx = a.cx() - b.cx();
    const double dy = a.cy() - b.cy();
    return std::hypot(dx, dy);
}

Direction direction(const Point& x, const Point& y) {
    require(x.dim == 2 && y.dim == 2, "directions need planar points");
    const double dx = x.v[0] - y.v[0];
    const double dy = x.v[1] - y.v[1];
    require(dx != 0.0 || dy != 0.0, "direction undefined for coincident points");
    return Direction::from_angle(std::atan2(dy, dx));
}

double projected_entropy(const DyadicMeasure& eta, const Direction& v, int q) {
    require(eta.dim == 2, "projections act on planar measures");
    require(q >= 1 && q <= 40, "projection depth out of range");
    const double side = std::ldexp(1.0, -eta.depth);
    const double vx = v.cx();
    const double vy = v.cy();
    std::unordered_map<int64_t, double> bins;
    bins.reserve(eta.cells.size());
    for (const auto& [code, mass] : eta.cells) {
        auto [jx, jy] = morton_decode(2, code);
        const double cx = (double(jx) + 0.5) * side;
        const double cy = (double(jy) + 0.5) * side;
        const double t = vx * cx + vy * cy;
        bins[int64_t(std::floor(std::ldexp(t, q)))] += mass;
    }
    std::vector<double> weights;
    weights.reserve(bins.size());
    for (const auto& [bin, w] : bins) weights.push_back(w);
    return entropy_of_weights(weights) / double(q);
}

double direction_continuity_check(const DyadicMeasure& eta, const Direction& v,
                                  const Direction& v2, int q) {
    require(chord_distance(v, v2) <= std::ldexp(1.0, -q) + 1e-15,
            "directions too far apart for the continuity bound");
    return std::fabs(projected_entropy(eta, v, q) - projected_entropy(eta, v2, q));
}

double expected_projected_entropy(const SceneryDistribution& scn, const Direction& v,
                                  int q) {
    double acc = 0.0;
    for (const auto& atom : scn.atoms)
        acc += atom.weight * std::min(projected_entropy(atom.view, v, q), 1.0);
    return acc;
}

uint64_t pinned_distance_count(const Point& x, const GridSet& A) {
    require(x.dim == A.dim, "pin dimension must match the set");
    const double px = std::ldexp(x.v[0], A.scale);
    const double py = A.dim == 2 ? std::ldexp(x.v[1], A.scale) : 0.0;
    std::vector<double> xs, ys;
    A.coordinates(xs, ys);
    std::vector<uint64_t> bitmap(bitmap_words(A.scale), 0);
    kernels::active().bin_bitmap(px, py, xs.data(), ys.data(), xs.size(), bitmap.data());
    return kernels::popcount(bitmap);
}

PinnedScanResult pinned_scan(const GridSet& A, double t, PinPolicy policy) {
    require(t > 0.0 && t <= double(A.dim), "pinned threshold exponent out of range");
    const size_t n = A.size();
    PinnedScanResult res;
    res.threshold = std::exp2(t * A.scale);

    // Full scans are quadratic; fall back to seeded pin sampling once the
    // pair count leaves desk scale.
    const bool full_ok = double(n) * double(n) <= 4e9;
    if (policy.all && full_ok) {
        res.pins.resize(n);
        std::iota(res.pins.begin(), res.pins.end(), size_t(0));
    } else {
        uint64_t want = policy.all ? 16384 : (policy.sample_n ? policy.sample_n : 16384);
        if (want >= n) {
            res.pins.resize(n);
            std::iota(res.pins.begin(), res.pins.end(), size_t(0));
        } else {
            res.sampled = true;
            res.sample_seed = policy.seed;
            res.pins = sample_indices(n, size_t(want), policy.seed);
        }
    }

    std::vector<double> xs, ys;
    A.coordinates(xs, ys);
    res.counts.assign(res.pins.size(), 0);
    const auto& impl = kernels::active();
    const size_t words = bitmap_words(A.scale);
    parallel_for(res.pins.size(), [&](size_t lo, size_t hi) {
        std::vector<uint64_t> bitmap(words);
        for (size_t i = lo; i < hi; ++i) {
            std::fill(bitmap.begin(), bitmap.end(), 0);
            const size_t p = res.pins[i];
            impl.bin_bitmap(xs[p], ys[p], xs.data(), ys.data(), xs.size(), bitmap.data());
            res.counts[i] = kernels::popcount(bitmap);
        }
    });

    std::map<uint64_t, uint64_t> hist;
    for (size_t i = 0; i < res.counts.size(); ++i) {
        hist[res.counts[i]]++;
        if (double(res.counts[i]) < res.threshold) res.exceptional++;
    }
    res.histogram.assign(hist.begin(), hist.end());
    return res;
}

uint64_t distance_set_count(const GridSet& A, const GridSet& B) {
    require(A.dim == B.dim, "sets must share a dimension");
    require(A.scale == B.scale, "sets must share a scale");
    std::vector<double> axs, ays, bxs, bys;
    A.coordinates(axs, ays);
    B.coordinates(bxs, bys);
    const size_t words = bitmap_words(A.scale);
    std::vector<uint64_t> global(words, 0);
    std::mutex merge_mutex;
    const auto& impl = kernels::active();
    parallel_for(A.size(), [&](size_t lo, size_t hi) {
        std::vector<uint64_t> local(words, 0);
        for (size_t i = lo; i < hi; ++i)
            impl.bin_bitmap(axs[i], ays[i], bxs.data(), bys.data(), bxs.size(),
                            local.data());
        std::lock_guard<std::mutex> lk(merge_mutex);
        for (size_t w = 0; w < words; ++w) global[w] |= local[w];
    });
    return kernels::popcount(global);
}

double half_distance_entropy(const Point& x, const DyadicMeasure& mu, int N_prime) {
    require(x.dim == mu.dim, "pin dimension must match the measure");
    require(N_prime >= 1 && N_prime <= 40, "distance partition depth out of range");
    const double side = std::ldexp(1.0, -mu.depth);
    std::unordered_map<uint64_t, double> bins;
    bins.reserve(mu.cells.size());
    for (const auto& [code, mass] : mu.cells) {
        double dx, dy = 0.0;
        if (mu.dim == 2) {
            auto [jx, jy] = morton_decode(2, code);
            dx = (double(jx) + 0.5) * side - x.v[0];
            dy = (double(jy) + 0.5) * side - x.v[1];
        } else {
            dx = (double(code) + 0.5) * side - x.v[0];
        }
        const double half_dist = 0.5 * std::hypot(dx, dy);
        require(half_dist < 1.0, "pin too far from the support: |x-y| >= 2");
        bins[uint64_t(std::ldexp(half_dist, N_prime))] += mass;
    }
    std::vector<double> weights;
    weights.reserve(bins.size());
    for (const auto& [bin, w] : bins) weights.push_back(w);
    return entropy_of_weights(weights) / double(N_prime);
}

bool in_cone(const Cone& c, const Point& y) {
    check_beta(c.beta);
    require(c.apex.dim == 2 && y.dim == 2, "cones live in the plane");
    const double dx = y.v[0] - c.apex.v[0];
    const double dy = y.v[1] - c.apex.v[1];
    require(dx != 0.0 || dy != 0.0, "cone membership undefined at the apex");
    double axis = c.dir.theta;
    if (axis >= kPi) axis -= kPi;
    return line_gap(line_angle(dx, dy), axis) < c.beta;
}

bool well_surrounded(const Point& x, const GridSet& B, double beta, double r_min) {
    check_beta(beta);
    const std::vector<double> angles = qualifying_angles(x, B, r_min);
    if (angles.empty()) return false;
    double max_gap = angles.front() + kPi - angles.back();
    for (size_t i = 1; i < angles.size(); ++i)
        max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
    return max_gap < 2.0 * beta;
}

bool well_surrounded_grid_check(const Point& x, const GridSet& B, double beta,
                                double r_min, int grid_log2) {
    check_beta(beta);
    require(grid_log2 >= 4 && grid_log2 <= 20, "direction grid too coarse or too fine");
    const std::vector<double> angles = qualifying_angles(x, B, r_min);
    if (angles.empty()) return false;
    const double step = std::ldexp(1.0, -grid_log2);
    const uint64_t count = uint64_t(std::ceil(kPi / step));
    for (uint64_t i = 0; i < count; ++i) {
        const double v = double(i) * step;
        // Nearest qualifying angle on the circle R/pi.
        auto it = std::lower_bound(angles.begin(), angles.end(), v);
        double best = kPi;
        if (it != angles.end()) best = std::min(best, line_gap(*it, v));
        if (it != angles.begin()) best = std::min(best, line_gap(*(it - 1), v));
        best = std::min(best, line_gap(angles.front(), v));
        best = std::min(best, line_gap(angles.back(), v));
        if (!(best < beta)) return false;
    }
    return true;
}

ConicalScanResult exceptional_set(const GridSet& B, double beta, double r_min,
                                  std::optional<double> s, std::optional<double> kappa) {
    check_beta(beta);
    ConicalScanResult res;
    res.total = B.size();
    std::vector<std::vector<uint64_t>> partial(1);
    std::mutex merge_mutex;
    parallel_for(B.size(), [&](size_t lo, size_t hi) {
        std::vector<uint64_t> local;
        for (size_t i = lo; i < hi; ++i) {
            if (!well_surrounded(B.unit_point(i), B, beta, r_min))
                local.push_back(B.codes[i]);
        }
        std::lock_guard<std::mutex> lk(merge_mutex);
        partial.push_back(std::move(local));
    });
    for (auto& part : partial)
        res.exceptional_codes.insert(res.exceptional_codes.end(), part.begin(),
                                     part.end());
    std::sort(res.exceptional_codes.begin(), res.exceptional_codes.end());
    res.fraction = double(res.exceptional_codes.size()) / double(res.total);
    if (s && kappa) {
        res.cardinality_bound = std::exp2((1.0 - *kappa) * (*s) * B.scale);
        res.within_bound = double(res.exceptional_codes.size()) <= *res.cardinality_bound;
    }
    return res;
}

}  // namespace fractlab
