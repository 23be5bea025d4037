#pragma once

#include <cmath>
#include <vector>

#include "fractlab/common.hpp"

namespace fractlab {

struct ols_fit_t {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

// Ordinary least squares y = a + b x. Needs >= 2 points (callers that follow
// the box-dimension contract require >= 3 scales themselves).
inline ols_fit_t ols_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    require(xs.size() == ys.size(), "ols: mismatched sample lengths");
    const size_t n = xs.size();
    require(n >= 2, "ols: need at least two points");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx > 0.0, "ols: degenerate abscissae");
    ols_fit_t fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace fractlab
