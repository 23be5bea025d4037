#include "fractlab/measure.hpp"

#include <algorithm>
#include <cmath>

namespace fractlab {

namespace {

// renormalize in place by the exact current total, preventing drift across
// chained restrictions
void renormalize(std::vector<std::pair<uint64_t, double>>& cells) {
    double total = 0.0;
    for (auto& [c, m] : cells) total += m;
    require(total > 0.0, "measure: total mass is zero");
    for (auto& [c, m] : cells) m /= total;
}

}  // namespace

DyadicMeasure DyadicMeasure::make(int dim, int depth,
                                  std::vector<std::pair<uint64_t, double>> cells) {
    require(dim == 1 || dim == 2, "measure: dimension must be 1 or 2");
    require(depth >= 0, "measure: negative depth");
    require(dim * depth <= 48, "measure: depth exceeds supported code width");
    uint64_t limit = uint64_t(1) << (dim * depth);
    std::erase_if(cells, [](const auto& cm) { return cm.second == 0.0; });
    require(!cells.empty(), "measure: empty support");
    for (auto& [c, m] : cells) {
        require(m > 0.0 && std::isfinite(m), "measure: masses must be positive finite");
        require(c < limit, "measure: cell code out of range for depth");
    }
    std::sort(cells.begin(), cells.end());
    for (size_t i = 1; i < cells.size(); ++i)
        require(cells[i].first != cells[i - 1].first, "measure: duplicate cell code");
    renormalize(cells);
    DyadicMeasure mu;
    mu.dim = dim;
    mu.depth = depth;
    mu.cells = std::move(cells);
    return mu;
}

double DyadicMeasure::total_mass() const {
    double t = 0.0;
    for (auto& [c, m] : cells) t += m;
    return t;
}

double DyadicMeasure::cell_mass(int k, uint64_t code_at_k) const {
    require(k >= 0 && k <= depth, "cell_mass: depth out of range");
    int shift = dim * (depth - k);
    uint64_t lo = code_at_k << shift;
    uint64_t hi = (code_at_k + 1) << shift;
    auto begin = std::lower_bound(cells.begin(), cells.end(), lo,
                                  [](const auto& cm, uint64_t v) { return cm.first < v; });
    double t = 0.0;
    for (auto it = begin; it != cells.end() && it->first < hi; ++it) t += it->second;
    return t;
}

std::vector<std::pair<uint64_t, double>> DyadicMeasure::coarsen(int k) const {
    require(k >= 0 && k <= depth, "coarsen: depth out of range");
    int shift = dim * (depth - k);
    std::vector<std::pair<uint64_t, double>> out;
    for (auto& [c, m] : cells) {
        uint64_t p = c >> shift;
        if (!out.empty() && out.back().first == p)
            out.back().second += m;
        else
            out.emplace_back(p, m);
    }
    return out;
}

DyadicMeasure DyadicMeasure::restrict_normalize(const std::vector<DyadicCube>& cubes) const {
    require(!cubes.empty(), "restrict_normalize: empty cube family");
    // gather the depth-N code ranges of the cubes, then sweep once
    std::vector<std::pair<uint64_t, uint64_t>> ranges;
    ranges.reserve(cubes.size());
    for (const auto& q : cubes) {
        require(q.dim == dim, "restrict_normalize: cube dimension mismatch");
        require(q.depth >= 0 && q.depth <= depth, "restrict_normalize: cube deeper than measure");
        int shift = dim * (depth - q.depth);
        ranges.emplace_back(q.code() << shift, (q.code() + 1) << shift);
    }
    std::sort(ranges.begin(), ranges.end());
    std::vector<std::pair<uint64_t, double>> kept;
    auto it = cells.begin();
    uint64_t covered = 0;  // merge overlapping/nested ranges on the fly
    for (auto& [lo, hi] : ranges) {
        uint64_t from = std::max(lo, covered);
        if (hi <= from) continue;
        it = std::lower_bound(it, cells.end(), from,
                              [](const auto& cm, uint64_t v) { return cm.first < v; });
        for (; it != cells.end() && it->first < hi; ++it) kept.push_back(*it);
        covered = hi;
    }
    require(!kept.empty(), "restrict_normalize: restriction has zero mass");
    renormalize(kept);
    DyadicMeasure out;
    out.dim = dim;
    out.depth = depth;
    out.cells = std::move(kept);
    return out;
}

DyadicMeasure DyadicMeasure::minicube_at(uint64_t code_at_n, int n) const {
    require(n >= 0, "minicube: negative depth");
    if (n == 0) return *this;  // T_Q is the identity on the unit cube
    require(n <= depth - 1, "minicube: depth budget exhausted (n must be <= N-1)");
    int shift = dim * (depth - n);
    uint64_t lo = code_at_n << shift;
    uint64_t hi = (code_at_n + 1) << shift;
    auto begin = std::lower_bound(cells.begin(), cells.end(), lo,
                                  [](const auto& cm, uint64_t v) { return cm.first < v; });
    std::vector<std::pair<uint64_t, double>> zoomed;
    for (auto it = begin; it != cells.end() && it->first < hi; ++it)
        zoomed.emplace_back(it->first - lo, it->second);  // re-key into [0,1)^d
    require(!zoomed.empty(), "minicube: point not in the rho-support of the measure");
    renormalize(zoomed);
    DyadicMeasure out;
    out.dim = dim;
    out.depth = depth - n;
    out.cells = std::move(zoomed);
    return out;
}

DyadicMeasure DyadicMeasure::minicube(const Point& x, int n) const {
    require(x.dim == dim, "minicube: point dimension mismatch");
    if (n == 0) return *this;
    require(n <= depth - 1, "minicube: depth budget exhausted (n must be <= N-1)");
    return minicube_at(cell_of(x, n).code(), n);
}

DyadicMeasure uniform_measure(int dim, int depth) {
    require(dim * depth <= 26, "uniform_measure: full grid too large");
    uint64_t count = uint64_t(1) << (dim * depth);
    std::vector<std::pair<uint64_t, double>> cells(count);
    double m = 1.0 / double(count);
    for (uint64_t c = 0; c < count; ++c) cells[c] = {c, m};
    DyadicMeasure mu;
    mu.dim = dim;
    mu.depth = depth;
    mu.cells = std::move(cells);
    return mu;
}

DyadicMeasure point_mass(const Point& x, int depth) {
    DyadicMeasure mu;
    mu.dim = x.dim;
    mu.depth = depth;
    mu.cells = {{cell_of(x, depth).code(), 1.0}};
    return mu;
}

DyadicMeasure bernoulli_product(int dim, int depth, double px, double py) {
    require(px > 0.0 && px < 1.0 && (dim == 1 || (py > 0.0 && py < 1.0)),
            "bernoulli_product: probabilities must lie in (0,1)");
    require(dim * depth <= 26, "bernoulli_product: full grid too large");
    uint64_t count = uint64_t(1) << (dim * depth);
    std::vector<std::pair<uint64_t, double>> cells(count);
    for (uint64_t c = 0; c < count; ++c) {
        auto idx = morton_decode(dim, c);
        double m = 1.0;
        for (int b = 0; b < depth; ++b) {
            m *= (idx[0] >> b) & 1 ? (1.0 - px) : px;
            if (dim == 2) m *= (idx[1] >> b) & 1 ? (1.0 - py) : py;
        }
        cells[c] = {c, m};
    }
    renormalize(cells);  // the float products sum to 1 only up to rounding
    DyadicMeasure mu;
    mu.dim = dim;
    mu.depth = depth;
    mu.cells = std::move(cells);
    return mu;
}

}  // namespace fractlab
