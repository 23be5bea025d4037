#include "fractlab/gridset.hpp"

#include <algorithm>
#include <cmath>

namespace fractlab {

GridSet GridSet::make(int dim, int scale, std::vector<uint64_t> codes) {
    require(dim == 1 || dim == 2, "gridset: dimension must be 1 or 2");
    require(scale >= 0 && dim * scale <= 48, "gridset: scale out of supported range");
    require(!codes.empty(), "gridset: empty set");
    uint64_t limit = uint64_t(1) << (dim * scale);
    for (uint64_t c : codes) require(c < limit, "gridset: point outside the grid");
    std::sort(codes.begin(), codes.end());
    for (size_t i = 1; i < codes.size(); ++i)
        require(codes[i] != codes[i - 1], "gridset: duplicate point");
    GridSet a;
    a.dim = dim;
    a.scale = scale;
    a.codes = std::move(codes);
    return a;
}

void GridSet::coordinates(std::vector<double>& xs, std::vector<double>& ys) const {
    xs.resize(codes.size());
    ys.resize(codes.size());
    for (size_t i = 0; i < codes.size(); ++i) {
        auto p = morton_decode(dim, codes[i]);
        xs[i] = double(p[0]);
        ys[i] = double(p[1]);
    }
}

Point GridSet::unit_point(size_t i) const {
    auto p = morton_decode(dim, codes[i]);
    Point x;
    x.dim = dim;
    x.v[0] = std::ldexp(double(p[0]), -scale);
    x.v[1] = dim == 2 ? std::ldexp(double(p[1]), -scale) : 0.0;
    return x;
}

bool GridSet::contains(uint64_t code) const {
    return std::binary_search(codes.begin(), codes.end(), code);
}

}  // namespace fractlab
