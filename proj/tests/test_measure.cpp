#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fractlab/measure.hpp"
#include "fractlab/regular.hpp"

using namespace fractlab;

namespace {

// sparse random measure for property tests
DyadicMeasure random_measure(rng64& rng, int dim, int depth, int support) {
    std::vector<std::pair<uint64_t, double>> cells;
    const uint64_t cap = uint64_t(1) << (dim * depth);
    for (int i = 0; i < support; ++i)
        cells.emplace_back(rng.below(cap), 0.05 + rng.unit());
    // duplicates possible; merge by summing
    std::sort(cells.begin(), cells.end());
    std::vector<std::pair<uint64_t, double>> merged;
    for (const auto& c : cells) {
        if (!merged.empty() && merged.back().first == c.first)
            merged.back().second += c.second;
        else
            merged.push_back(c);
    }
    return DyadicMeasure::make(dim, depth, std::move(merged));
}

PatternSpec three_quadrant(int levels) {
    PatternSpec p;
    p.dim = 2;
    p.block_depth = 1;
    p.kept = {{0, 0}, {1, 0}, {0, 1}};
    p.levels = levels;
    return p;
}

// same support, masses within tol (renormalization costs a few ulps)
bool approx_same(const DyadicMeasure& a, const DyadicMeasure& b,
                 double tol = 1e-12) {
    if (a.dim != b.dim || a.depth != b.depth || a.cells.size() != b.cells.size())
        return false;
    for (size_t i = 0; i < a.cells.size(); ++i) {
        if (a.cells[i].first != b.cells[i].first) return false;
        if (std::abs(a.cells[i].second - b.cells[i].second) > tol) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("make validates, sorts and normalizes") {
    auto mu = DyadicMeasure::make(1, 2, {{3, 1.0}, {0, 1.0}, {1, 2.0}});
    CHECK(mu.support_size() == 3);
    CHECK(mu.cells.front().first == 0);
    CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mu.cells[1].second == doctest::Approx(0.5));

    CHECK_THROWS_AS(DyadicMeasure::make(1, 2, {{0, 1.0}, {0, 1.0}}), error);
    CHECK_THROWS_AS(DyadicMeasure::make(1, 2, {{4, 1.0}}), error);
    CHECK_THROWS_AS(DyadicMeasure::make(1, 2, {{0, -1.0}}), error);
    CHECK_THROWS_AS(DyadicMeasure::make(1, 2, {}), error);
}

TEST_CASE("cell_mass equals the sum over the coarse cell") {
    rng64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 1 + int(rng.below(2));
        const int depth = 6;
        auto mu = random_measure(rng, dim, depth, 40);
        for (int k = 0; k <= depth; ++k) {
            double total = 0.0;
            for (const auto& [code, mass] : mu.coarsen(k)) {
                CHECK(mu.cell_mass(k, code) == doctest::Approx(mass).epsilon(1e-12));
                total += mass;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("aggregation consistency across depths") {
    rng64 rng(12);
    auto mu = random_measure(rng, 2, 7, 120);
    for (int k = 0; k < 7; ++k) {
        const auto coarse = mu.coarsen(k);
        const auto fine = mu.coarsen(k + 1);
        for (const auto& [code, mass] : coarse) {
            double child_sum = 0.0;
            for (const auto& [fc, fm] : fine)
                if ((fc >> 2) == code) child_sum += fm;
            CHECK(child_sum == doctest::Approx(mass).epsilon(1e-9));
        }
    }
}

TEST_CASE("restrict_normalize worked values") {
    // masses (.5,.25,.25,0) on the depth-1 cells, keep codes {0,1}
    auto mu = DyadicMeasure::make(2, 1, {{0, 0.5}, {1, 0.25}, {2, 0.25}});
    DyadicCube a, b;
    a.dim = b.dim = 2;
    a.depth = b.depth = 1;
    a.index = morton_decode(2, 0);
    b.index = morton_decode(2, 1);
    auto nu = mu.restrict_normalize({a, b});
    CHECK(nu.cell_mass(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(nu.cell_mass(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(nu.cell_mass(1, 2) == 0.0);
    CHECK(nu.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

    // restriction to the left half of the uniform measure is uniform there
    auto uni = uniform_measure(2, 3);
    DyadicCube left;
    left.dim = 2;
    left.depth = 1;
    left.index = {0, 0};
    DyadicCube lower;
    lower.dim = 2;
    lower.depth = 1;
    lower.index = {0, 1};
    auto half = uni.restrict_normalize({left, lower});
    CHECK(half.support_size() == 32);
    for (const auto& [code, mass] : half.cells)
        CHECK(mass == doctest::Approx(1.0 / 32.0).epsilon(1e-12));

    // restriction to a superset of the support is the identity
    DyadicCube root;
    root.dim = 2;
    root.depth = 0;
    CHECK(mu.restrict_normalize({root}) == mu);

    // empty intersection is an error
    DyadicCube far;
    far.dim = 2;
    far.depth = 1;
    far.index = {1, 1};
    CHECK_THROWS_AS(mu.restrict_normalize({far}), error);
}

TEST_CASE("restrict_normalize is idempotent on its own output") {
    rng64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        auto mu = random_measure(rng, 2, 5, 30);
        DyadicCube left;
        left.dim = 2;
        left.depth = 1;
        left.index = {0, 0};
        DyadicCube right;
        right.dim = 2;
        right.depth = 1;
        right.index = {1, 0};
        double mass = mu.cell_mass(1, left.code()) + mu.cell_mass(1, right.code());
        if (mass <= 0.0) continue;
        auto once = mu.restrict_normalize({left, right});
        auto twice = once.restrict_normalize({left, right});
        CHECK(approx_same(once, twice));
    }
}

TEST_CASE("minicube of the uniform measure is uniform") {
    auto uni = uniform_measure(2, 4);
    for (int n : {1, 2, 3}) {
        auto zoom = uni.minicube(point2(0.3, 0.7), n);
        CHECK(zoom.depth == 4 - n);
        CHECK(zoom == uniform_measure(2, 4 - n));
    }
    CHECK(uni.minicube(point2(0.9, 0.1), 0) == uni);
    CHECK_THROWS_AS(uni.minicube(point2(0.1, 0.1), 4), error);
}

TEST_CASE("minicube of a pattern measure is the shallower pattern measure") {
    auto mu = set_to_measure(generate_pattern_set(three_quadrant(5)));
    auto expect = set_to_measure(generate_pattern_set(three_quadrant(4)));
    // x inside the kept quadrant (0,0)
    CHECK(approx_same(mu.minicube(point2(0.1, 0.2), 1), expect));
    // zooming into the discarded quadrant (1,1) must fail
    CHECK_THROWS_AS(mu.minicube(point2(0.9, 0.9), 1), error);
}

TEST_CASE("minicube composes along the doubling map") {
    rng64 rng(14);
    for (int trial = 0; trial < 40; ++trial) {
        const int dim = 1 + int(rng.below(2));
        auto mu = random_measure(rng, dim, 8, 60);
        // pick a support cell and zoom from its interior point
        const auto& [code, mass] = mu.cells[rng.below(mu.cells.size())];
        const auto idx = morton_decode(dim, code);
        Point x;
        x.dim = dim;
        x.v[0] = std::ldexp(double(idx[0]) + 0.5, -8);
        x.v[1] = dim == 2 ? std::ldexp(double(idx[1]) + 0.5, -8) : 0.0;
        const int m = 2, n = 3;
        Point xm = x;
        for (int i = 0; i < m; ++i) xm = doubling_map(xm);
        CHECK(approx_same(mu.minicube(x, m).minicube(xm, n),
                          mu.minicube(x, m + n)));
    }
}

TEST_CASE("minicube_at matches minicube") {
    rng64 rng(15);
    auto mu = random_measure(rng, 2, 6, 50);
    for (const auto& [code, mass] : mu.coarsen(2)) {
        const auto idx = morton_decode(2, code);
        const Point x = point2(std::ldexp(double(idx[0]) + 0.5, -2),
                               std::ldexp(double(idx[1]) + 0.5, -2));
        CHECK(mu.minicube_at(code, 2) == mu.minicube(x, 2));
    }
}

TEST_CASE("canonical measures") {
    auto uni = uniform_measure(1, 3);
    CHECK(uni.support_size() == 8);
    CHECK(uni.cells[5].second == doctest::Approx(0.125));

    auto pm = point_mass(point2(0.3, 0.7), 5);
    CHECK(pm.support_size() == 1);
    CHECK(pm.cells[0].first == cell_of(point2(0.3, 0.7), 5).code());
    CHECK(pm.cells[0].second == 1.0);

    // Bernoulli(1/2) is uniform; Bernoulli(p) has the product masses
    CHECK(bernoulli_product(1, 4, 0.5) == uniform_measure(1, 4));
    auto bern = bernoulli_product(1, 2, 0.7);
    CHECK(bern.cell_mass(2, 0) == doctest::Approx(0.49).epsilon(1e-12));
    CHECK(bern.cell_mass(2, 3) == doctest::Approx(0.09).epsilon(1e-12));
    auto bern2 = bernoulli_product(2, 1, 0.7, 0.6);
    CHECK(bern2.cell_mass(1, morton_encode(2, 0, 0)) ==
          doctest::Approx(0.42).epsilon(1e-12));
    CHECK(bern2.cell_mass(1, morton_encode(2, 1, 1)) ==
          doctest::Approx(0.12).epsilon(1e-12));
}
