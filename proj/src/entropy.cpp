#include "fractlab/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace fractlab {

namespace {

inline double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

EntropyValue shannon_entropy(const DyadicMeasure& mu, int k) {
    require(k >= 0, "shannon_entropy: negative depth");
    require(k <= mu.depth, "shannon_entropy: partition finer than the measure resolution");
    int shift = mu.dim * (mu.depth - k);
    double h = 0.0;
    // aggregate over depth-k prefix runs without materializing the coarsening
    size_t i = 0;
    while (i < mu.cells.size()) {
        uint64_t prefix = mu.cells[i].first >> shift;
        double m = 0.0;
        for (; i < mu.cells.size() && (mu.cells[i].first >> shift) == prefix; ++i)
            m += mu.cells[i].second;
        h += plogp(m);
    }
    return {h, k};
}

double normalized_entropy(const DyadicMeasure& mu, int k) {
    require(k >= 1, "normalized_entropy: depth must be positive");
    return shannon_entropy(mu, k).bits / double(k);
}

EntropyValue conditional_entropy(const DyadicMeasure& mu, int k2, int k1) {
    require(k1 <= k2, "conditional_entropy: coarse depth exceeds fine depth");
    require(k1 >= 0 && k2 <= mu.depth, "conditional_entropy: depth out of range");
    int shift1 = mu.dim * (mu.depth - k1);
    int shift2 = mu.dim * (mu.depth - k2);
    double h = 0.0;
    size_t i = 0;
    while (i < mu.cells.size()) {
        uint64_t coarse = mu.cells[i].first >> shift1;
        // first pass over the run: mass of G; second: H(mu_G, D_k2)
        size_t begin = i;
        double mass = 0.0;
        for (; i < mu.cells.size() && (mu.cells[i].first >> shift1) == coarse; ++i)
            mass += mu.cells[i].second;
        double hg = 0.0;
        size_t j = begin;
        while (j < i) {
            uint64_t fine = mu.cells[j].first >> shift2;
            double m = 0.0;
            for (; j < i && (mu.cells[j].first >> shift2) == fine; ++j)
                m += mu.cells[j].second;
            hg += plogp(m / mass);
        }
        h += mass * hg;
    }
    return {h, k2};
}

EntropyValue shifted_grid_entropy(const DyadicMeasure& mu, int q) {
    require(q >= 1 && q < mu.depth, "shifted_grid_entropy: need 1 <= q < N");
    // Shift by half a target cell, i.e. 2^(N-q-1) grid units: each depth-N
    // cell maps to shifted bin floor((j + 2^(N-q-1)) / 2^(N-q)) mod 2^q per
    // coordinate. Accumulate masses per shifted bin via a sort-free map.
    int drop = mu.depth - q;
    uint32_t half = uint32_t(1) << (drop - 1);
    uint32_t wrap = uint32_t(1) << q;
    std::vector<std::pair<uint64_t, double>> bins;
    bins.reserve(mu.cells.size());
    for (auto& [c, m] : mu.cells) {
        auto idx = morton_decode(mu.dim, c);
        uint32_t bx = ((idx[0] + half) >> drop) % wrap;
        uint32_t by = mu.dim == 2 ? ((idx[1] + half) >> drop) % wrap : 0;
        bins.emplace_back(morton_encode(mu.dim, bx, by), m);
    }
    std::sort(bins.begin(), bins.end());
    double h = 0.0;
    size_t i = 0;
    while (i < bins.size()) {
        uint64_t b = bins[i].first;
        double m = 0.0;
        for (; i < bins.size() && bins[i].first == b; ++i) m += bins[i].second;
        h += plogp(m);
    }
    return {h, q};
}

double entropy_of_weights(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double x : w) h += plogp(x / total);
    return h;
}

}  // namespace fractlab
