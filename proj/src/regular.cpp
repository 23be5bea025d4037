#include "fractlab/regular.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fractlab/kernels.hpp"
#include "fractlab/stats.hpp"

namespace fractlab {

double PatternSpec::implied_s() const {
    return std::log2(double(kept.size())) / double(block_depth);
}

GridSet generate_pattern_set(const PatternSpec& spec) {
    require(spec.dim == 1 || spec.dim == 2, "pattern: dimension must be 1 or 2");
    require(spec.block_depth >= 1 && spec.levels >= 1, "pattern: b and L must be positive");
    require(!spec.kept.empty(), "pattern: empty kept-cell pattern");
    require(spec.dim * spec.scale() <= 48, "pattern: b*L exceeds the depth budget");
    uint32_t block_side = uint32_t(1) << spec.block_depth;
    std::vector<uint64_t> pattern;
    pattern.reserve(spec.kept.size());
    for (auto& cell : spec.kept) {
        require(cell[0] < block_side && (spec.dim == 1 || cell[1] < block_side),
                "pattern: kept cell outside the block");
        pattern.push_back(morton_encode(spec.dim, cell[0], cell[1]));
    }
    std::sort(pattern.begin(), pattern.end());
    pattern.erase(std::unique(pattern.begin(), pattern.end()), pattern.end());

    int shift = spec.dim * spec.block_depth;
    std::vector<uint64_t> codes{0};
    for (int level = 0; level < spec.levels; ++level) {
        std::vector<uint64_t> next;
        next.reserve(codes.size() * pattern.size());
        for (uint64_t c : codes)
            for (uint64_t p : pattern) next.push_back((c << shift) | p);
        codes = std::move(next);
    }
    return GridSet::make(spec.dim, spec.scale(), std::move(codes));
}

GridSet generate_katz_tao(int N) {
    require(N >= 4 && N % 2 == 0, "katz-tao: N must be even and >= 4");
    uint32_t half = uint32_t(1) << (N / 2);
    std::vector<uint64_t> codes;
    codes.reserve(size_t(half - 1) * half);
    for (uint32_t i = 0; i + 1 < half; ++i)
        for (uint32_t j = 0; j < half; ++j)
            codes.push_back(morton_encode(2, i * half, j));
    return GridSet::make(2, N, std::move(codes));
}

GridSet generate_random_regular(int N, double s, double C_target, uint64_t seed,
                                int dim) {
    require(dim == 1 || dim == 2, "random-regular: dimension must be 1 or 2");
    require(s > 0.0 && s <= double(dim), "random-regular: need s in (0, d]");
    require(C_target > 1.0, "random-regular: need C_target > 1");
    require(N >= 1 && dim * N <= 48, "random-regular: N out of range");
    const int fanout = 1 << dim;
    double branching = std::exp2(s);
    // snap integer branching factors (s = log2 m) so e.g. s = log2(3) gives
    // exactly 3 children per node instead of hitting float rounding
    if (std::abs(branching - std::round(branching)) < 1e-9)
        branching = std::round(branching);
    const uint64_t lo = uint64_t(std::floor(branching));
    const uint64_t hi = uint64_t(std::ceil(branching));
    require(hi <= uint64_t(fanout), "random-regular: branching exceeds 2^d");
    rng64 rng(seed);

    std::vector<uint64_t> nodes{0};
    uint32_t children[4];
    for (int k = 0; k < N; ++k) {
        const double target = std::exp2(s * double(k + 1));
        const double band_lo = target / C_target, band_hi = target * C_target;
        const size_t n = nodes.size();
        std::vector<uint64_t> next;
        next.reserve(size_t(double(n) * double(hi)));
        uint64_t done = 0;
        for (size_t i = 0; i < n; ++i) {
            const uint64_t rem = uint64_t(n - 1 - i);
            auto feasible = [&](uint64_t m) {
                double fmin = double(done + m) + double(rem) * double(lo);
                double fmax = double(done + m) + double(rem) * double(hi);
                return fmin <= band_hi && fmax >= band_lo;
            };
            uint64_t m;
            bool can_lo = feasible(lo), can_hi = feasible(hi);
            if (!can_lo && !can_hi)
                fail("random-regular: steering infeasible at depth " + std::to_string(k + 1) +
                     " (count " + std::to_string(done) + " of " + std::to_string(n) +
                     " nodes placed; band [" + std::to_string(band_lo) + ", " +
                     std::to_string(band_hi) + "])");
            if (can_lo && can_hi && lo != hi) {
                // move the cumulative count toward the ideal 2^(s(k+1)) pace
                double pace = target * double(i + 1) / double(n);
                m = std::abs(double(done + lo) - pace) <= std::abs(double(done + hi) - pace)
                        ? lo : hi;
            } else {
                m = can_lo ? lo : hi;
            }
            // random m-subset of the children via partial Fisher-Yates
            for (int c = 0; c < fanout; ++c) children[c] = uint32_t(c);
            for (uint64_t c = 0; c < m; ++c)
                std::swap(children[c], children[c + rng.below(uint64_t(fanout) - c)]);
            uint64_t base = nodes[i] << dim;
            for (uint64_t c = 0; c < m; ++c) next.push_back(base | children[c]);
            done += m;
        }
        if (double(done) < band_lo || double(done) > band_hi)
            fail("random-regular: level count left the target band");
        std::sort(next.begin(), next.end());
        nodes = std::move(next);
    }
    return GridSet::make(dim, N, std::move(nodes));
}

DyadicMeasure set_to_measure(const GridSet& A) {
    std::vector<std::pair<uint64_t, double>> cells;
    cells.reserve(A.size());
    double m = 1.0 / double(A.size());
    for (uint64_t c : A.codes) cells.emplace_back(c, m);
    DyadicMeasure mu;
    mu.dim = A.dim;
    mu.depth = A.scale;
    mu.cells = std::move(cells);
    return mu;
}

GridSet measure_to_set(const DyadicMeasure& mu) {
    std::vector<uint64_t> codes;
    codes.reserve(mu.cells.size());
    for (auto& [c, m] : mu.cells) codes.push_back(c);
    return GridSet::make(mu.dim, mu.depth, std::move(codes));
}

namespace {

struct per_k_stats {
    uint64_t min_count = UINT64_MAX, max_count = 0;
    size_t argmin = 0, argmax = 0;

    void update(uint64_t count, size_t pin) {
        if (count < min_count || (count == min_count && pin < argmin)) {
            min_count = count;
            argmin = pin;
        }
        if (count > max_count || (count == max_count && pin < argmax)) {
            max_count = count;
            argmax = pin;
        }
    }
    void merge(const per_k_stats& o) {
        if (o.min_count < min_count || (o.min_count == min_count && o.argmin < argmin)) {
            min_count = o.min_count;
            argmin = o.argmin;
        }
        if (o.max_count > max_count || (o.max_count == max_count && o.argmax < argmax)) {
            max_count = o.max_count;
            argmax = o.argmax;
        }
    }
};

RegularityReport report_from_stats(const GridSet& A, int N,
                                   const std::vector<per_k_stats>& stats,
                                   const std::vector<size_t>& pins,
                                   const std::vector<double>& mean_counts,
                                   std::optional<double> s_opt) {
    RegularityReport rep;
    rep.fitted = !s_opt.has_value();
    if (s_opt) {
        rep.s = *s_opt;
    } else {
        // fit on interior depths only; the boundary ones are saturated.
        // Shallow sets (N < 5) have too few interior depths, so widen the
        // window to k in [1, N-1] rather than refuse the fit.
        const int lo = N >= 5 ? 2 : 1;
        const int hi = N >= 5 ? N - 2 : N - 1;
        std::vector<double> ks, logs;
        for (int k = lo; k <= hi; ++k) {
            ks.push_back(double(k));
            logs.push_back(std::log2(mean_counts[size_t(k)]));
        }
        require(ks.size() >= 2, "regularity fit: not enough depths (need N >= 3)");
        rep.s = -ols_fit(ks, logs).slope;
    }

    rep.per_k.reserve(size_t(N));
    double worst = 0.0;
    for (int k = 0; k < N; ++k) {
        const auto& st = stats[size_t(k)];
        double expected = std::exp2(double(N - k) * rep.s);
        double upper = double(st.max_count) / expected;
        double lower = expected / double(st.min_count);
        double ck = std::max({upper, lower, 1.0});
        rep.per_k.push_back({k, st.min_count, st.max_count, ck});
        if (ck > worst) {
            worst = ck;
            rep.worst_k = k;
            rep.worst_upper = upper >= lower;
            rep.worst_point = A.point(pins[rep.worst_upper ? st.argmax : st.argmin]);
        }
    }
    rep.C_star = std::max(worst, 1.0);
    return rep;
}

}  // namespace

RegularityReport regularity_constant(const GridSet& A, std::optional<double> s,
                                     size_t sample_threshold, uint64_t sample_seed) {
    const int N = A.scale;
    require(N >= 1, "regularity: scale must be positive");
    std::vector<double> xs, ys;
    A.coordinates(xs, ys);

    // pin selection: everything when small, seeded sample otherwise
    std::vector<size_t> pins;
    bool sampled = A.size() > sample_threshold;
    if (sampled) {
        pins = sample_indices(A.size(), sample_threshold, sample_seed);
    } else {
        pins.resize(A.size());
        for (size_t i = 0; i < pins.size(); ++i) pins[i] = i;
    }

    std::vector<per_k_stats> stats(static_cast<size_t>(N));
    std::vector<double> mean_counts(size_t(N), 0.0);
    std::mutex merge_mutex;
    parallel_for(pins.size(), [&](size_t lo, size_t hi) {
        std::vector<per_k_stats> local(static_cast<size_t>(N));
        std::vector<double> local_sum(size_t(N), 0.0);
        std::vector<uint32_t> hist(static_cast<size_t>(N));
        const auto& impl = kernels::active();
        for (size_t p = lo; p < hi; ++p) {
            std::fill(hist.begin(), hist.end(), 0);
            double px = xs[pins[p]], py = ys[pins[p]];
            impl.level_hist(px, py, xs.data(), ys.data(), A.size(), N, hist.data());
            uint64_t cum = 0;
            for (int k = N - 1; k >= 0; --k) {
                cum += hist[size_t(k)];  // count within radius 2^-k
                local[size_t(k)].update(cum, p);
                local_sum[size_t(k)] += double(cum);
            }
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        for (int k = 0; k < N; ++k) {
            stats[size_t(k)].merge(local[size_t(k)]);
            mean_counts[size_t(k)] += local_sum[size_t(k)];
        }
    });
    for (auto& m : mean_counts) m /= double(pins.size());

    // stats track positions within `pins`; map back to set indices
    auto rep = report_from_stats(A, N, stats, pins, mean_counts, s);
    rep.sampled = sampled;
    rep.sample_size = pins.size();
    rep.sample_seed = sampled ? sample_seed : 0;
    return rep;
}

RegularityReport regularity_constant_naive(const GridSet& A, std::optional<double> s) {
    const int N = A.scale;
    require(N >= 1, "regularity: scale must be positive");
    std::vector<int64_t> xi(A.size()), yi(A.size());
    for (size_t i = 0; i < A.size(); ++i) {
        auto p = A.point(i);
        xi[i] = int64_t(p[0]);
        yi[i] = int64_t(p[1]);
    }
    std::vector<size_t> pins(A.size());
    for (size_t i = 0; i < pins.size(); ++i) pins[i] = i;

    std::vector<per_k_stats> stats(static_cast<size_t>(N));
    std::vector<double> mean_counts(size_t(N), 0.0);
    for (size_t p = 0; p < pins.size(); ++p) {
        for (int k = 0; k < N; ++k) {
            int64_t r2 = int64_t(1) << (2 * (N - k));  // (2^(N-k) grid units)^2
            uint64_t count = 0;
            for (size_t j = 0; j < A.size(); ++j) {
                int64_t dx = xi[j] - xi[p], dy = yi[j] - yi[p];
                if (dx * dx + dy * dy <= r2) ++count;
            }
            stats[size_t(k)].update(count, p);
            mean_counts[size_t(k)] += double(count);
        }
    }
    for (auto& m : mean_counts) m /= double(pins.size());

    auto rep = report_from_stats(A, N, stats, pins, mean_counts, s);
    rep.sampled = false;
    rep.sample_size = pins.size();
    return rep;
}

}  // namespace fractlab
