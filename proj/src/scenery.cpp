#include "fractlab/scenery.hpp"

#include <cmath>
#include <unordered_map>

#include "fractlab/entropy.hpp"

namespace fractlab {

double SceneryDistribution::total_weight() const {
    double t = 0.0;
    for (auto& a : atoms) t += a.weight;
    return t;
}

std::pair<DyadicMeasure, Point> magnify(const DyadicMeasure& mu, const Point& x) {
    return {mu.minicube(x, 1), doubling_map(x)};
}

namespace {

// Views are merged by their quantized mass maps. Two views count as equal
// when they occupy the same cells and every mass agrees to within the
// quantization step 2^-30 (i.e. after rounding to 30 fractional bits).
constexpr double kMassQuantum = 0x1.0p30;

struct view_key {
    std::vector<std::pair<uint64_t, int64_t>> cells;

    bool operator==(const view_key&) const = default;
};

view_key key_of(const DyadicMeasure& view) {
    view_key k;
    k.cells.reserve(view.cells.size());
    for (auto& [c, m] : view.cells)
        k.cells.emplace_back(c, int64_t(std::llround(m * kMassQuantum)));
    return k;
}

struct view_key_hash {
    size_t operator()(const view_key& k) const {
        uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the cell words
        auto mix = [&h](uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xFF;
                h *= 0x100000001b3ull;
            }
        };
        for (auto& [c, m] : k.cells) {
            mix(c);
            mix(uint64_t(m));
        }
        return size_t(h);
    }
};

class scenery_builder {
public:
    explicit scenery_builder(int q_view) { out_.q_view = q_view; }

    void add(DyadicMeasure view, double weight) {
        auto [it, fresh] = index_.try_emplace(key_of(view), out_.atoms.size());
        if (fresh)
            out_.atoms.push_back({std::move(view), weight});
        else
            out_.atoms[it->second].weight += weight;
    }

    SceneryDistribution take(int depth_lo, int depth_hi) {
        out_.depth_lo = depth_lo;
        out_.depth_hi = depth_hi;
        return std::move(out_);
    }

private:
    SceneryDistribution out_;
    std::unordered_map<view_key, size_t, view_key_hash> index_;
};

// Depth-q_view view of the minicube at the depth-n cell spanning
// cells[begin, end): re-key into the unit cube, aggregate to q_view levels,
// normalize by the run mass. Equivalent to truncating minicube_at(), fused
// into one pass because sceneries enumerate every run of the support.
DyadicMeasure view_of_run(const DyadicMeasure& mu, size_t begin, size_t end,
                          uint64_t base, int n, int q_view) {
    int shift = mu.dim * (mu.depth - n - q_view);
    std::vector<std::pair<uint64_t, double>> cells;
    double total = 0.0;
    for (size_t i = begin; i < end; ++i) {
        uint64_t code = (mu.cells[i].first - base) >> shift;
        double m = mu.cells[i].second;
        total += m;
        if (!cells.empty() && cells.back().first == code)
            cells.back().second += m;
        else
            cells.emplace_back(code, m);
    }
    for (auto& [c, m] : cells) m /= total;
    DyadicMeasure view;
    view.dim = mu.dim;
    view.depth = q_view;
    view.cells = std::move(cells);
    return view;
}

void check_window(const DyadicMeasure& mu, int A, int B, int q_view) {
    require(q_view >= 1, "scenery: view depth must be positive");
    require(0 <= A && A < B, "scenery: need 0 <= A < B");
    require(B <= mu.depth - q_view,
            "scenery: depth window violates the view budget (B <= N - q_view)");
}

}  // namespace

SceneryDistribution point_scenery(const DyadicMeasure& mu, const Point& x, int A,
                                  int B, int q_view) {
    check_window(mu, A, B, q_view);
    // positive mass at the deepest cell implies it at all shallower ones
    require(mu.cell_mass(B - 1, cell_of(x, B - 1).code()) > 0.0,
            "point_scenery: x leaves the rho-support before depth B-1");
    scenery_builder builder(q_view);
    double w = 1.0 / double(B - A);
    for (int n = A; n < B; ++n) {
        DyadicMeasure view = mu.minicube(x, n);
        view.cells = view.coarsen(q_view);
        view.depth = q_view;
        builder.add(std::move(view), w);
    }
    return builder.take(A, B);
}

SceneryDistribution measure_scenery(const DyadicMeasure& mu, int A, int B,
                                    int q_view) {
    check_window(mu, A, B, q_view);
    scenery_builder builder(q_view);
    double level_w = 1.0 / double(B - A);
    for (int n = A; n < B; ++n) {
        int shift = mu.dim * (mu.depth - n);
        size_t i = 0;
        while (i < mu.cells.size()) {
            uint64_t prefix = mu.cells[i].first >> shift;
            size_t begin = i;
            double mass = 0.0;
            for (; i < mu.cells.size() && (mu.cells[i].first >> shift) == prefix; ++i)
                mass += mu.cells[i].second;
            builder.add(view_of_run(mu, begin, i, prefix << shift, n, q_view),
                        mass * level_w);
        }
    }
    return builder.take(A, B);
}

double local_global_gap(const DyadicMeasure& mu, int N_prime, int q) {
    require(q >= 1 && q < N_prime, "local_global_gap: need 1 <= q < N'");
    require(N_prime <= mu.depth - q, "local_global_gap: need N' <= N - q");
    auto scn = measure_scenery(mu, 0, N_prime, q);
    double local = 0.0;
    for (auto& a : scn.atoms) local += a.weight * normalized_entropy(a.view, q);
    return normalized_entropy(mu, N_prime) - local;
}

RichnessVerdict richness(const DyadicMeasure& mu, int N_prime, int q, double delta,
                         double s) {
    require(delta > 0.0 && delta < 1.0, "richness: need delta in (0,1)");
    require(s > 0.0 && s <= double(mu.dim), "richness: need s in (0, d]");
    require(q >= 1 && q < N_prime && N_prime <= mu.depth - q,
            "richness: need q < N' <= N - q");
    auto scn = measure_scenery(mu, 0, N_prime, q);
    double defect = 0.0;
    for (auto& a : scn.atoms)
        if (normalized_entropy(a.view, q) < s - delta) defect += a.weight;
    return {N_prime, q, delta, defect, defect < delta};
}

std::vector<WeakRegularityRow> weak_regularity_profile(
    const DyadicMeasure& mu, double s, const std::vector<double>& delta_grid,
    const std::vector<int>& q_grid) {
    require(!delta_grid.empty() && !q_grid.empty(),
            "weak_regularity_profile: grids must be nonempty");
    std::vector<WeakRegularityRow> rows;
    for (double delta : delta_grid) {
        for (int q : q_grid) {
            int best = 0;
            for (int Np = mu.depth - q; Np > q; --Np) {
                if (richness(mu, Np, q, delta, s).is_rich) {
                    best = Np;
                    break;
                }
            }
            rows.push_back({delta, q, best});
        }
    }
    return rows;
}

}  // namespace fractlab
