#include "doctest.h"

#include <cmath>
#include <map>

#include "fractlab/entropy.hpp"
#include "fractlab/regular.hpp"

using namespace fractlab;

namespace {

PatternSpec three_quadrant(int levels) {
    PatternSpec p;
    p.dim = 2;
    p.block_depth = 1;
    p.kept = {{0, 0}, {1, 0}, {0, 1}};
    p.levels = levels;
    return p;
}

GridSet random_set(rng64& rng, int dim, int scale, size_t n) {
    std::vector<uint64_t> codes;
    const uint64_t cap = uint64_t(1) << (dim * scale);
    std::map<uint64_t, bool> seen;
    while (codes.size() < n) {
        const uint64_t c = rng.below(cap);
        if (!seen[c]) {
            seen[c] = true;
            codes.push_back(c);
        }
    }
    return GridSet::make(dim, scale, std::move(codes));
}

void check_reports_equal(const RegularityReport& a, const RegularityReport& b) {
    CHECK(a.s == doctest::Approx(b.s).epsilon(1e-12));
    CHECK(a.C_star == doctest::Approx(b.C_star).epsilon(1e-12));
    REQUIRE(a.per_k.size() == b.per_k.size());
    for (size_t i = 0; i < a.per_k.size(); ++i) {
        CHECK(a.per_k[i].k == b.per_k[i].k);
        CHECK(a.per_k[i].min_count == b.per_k[i].min_count);
        CHECK(a.per_k[i].max_count == b.per_k[i].max_count);
        CHECK(a.per_k[i].C_k == doctest::Approx(b.per_k[i].C_k).epsilon(1e-12));
    }
}

}  // namespace

TEST_CASE("pattern generator worked sets") {
    auto cantor = generate_pattern_set(three_quadrant(6));
    CHECK(cantor.size() == 729);
    CHECK(cantor.scale == 6);
    CHECK(three_quadrant(6).implied_s() == doctest::Approx(std::log2(3.0)));

    PatternSpec full;
    full.dim = 2;
    full.block_depth = 1;
    full.kept = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    full.levels = 4;
    auto grid = generate_pattern_set(full);
    CHECK(grid.size() == 256);
    CHECK(full.implied_s() == 2.0);

    PatternSpec ends;
    ends.dim = 1;
    ends.block_depth = 2;
    ends.kept = {{0, 0}, {3, 0}};
    ends.levels = 5;
    auto mid = generate_pattern_set(ends);
    CHECK(mid.size() == 32);
    CHECK(mid.scale == 10);
    CHECK(ends.implied_s() == 0.5);
    // middle-half structure: indices use only the end quarters per block
    for (size_t i = 0; i < mid.size(); ++i) {
        uint64_t c = mid.codes[i];
        for (int l = 0; l < 5; ++l) {
            const uint64_t block = c & 3;
            CHECK((block == 0 || block == 3));
            c >>= 2;
        }
    }

    PatternSpec empty;
    empty.dim = 2;
    empty.levels = 2;
    CHECK_THROWS_AS(generate_pattern_set(empty), error);
}

TEST_CASE("katz-tao product set") {
    auto a4 = generate_katz_tao(4);
    CHECK(a4.size() == 12);
    std::map<uint32_t, int> xs, ys;
    for (size_t i = 0; i < a4.size(); ++i) {
        xs[a4.point(i)[0]] += 1;
        ys[a4.point(i)[1]] += 1;
    }
    CHECK(xs.size() == 3);  // x-indices {0, 4, 8}
    CHECK(xs.count(0) == 1);
    CHECK(xs.count(4) == 1);
    CHECK(xs.count(8) == 1);
    CHECK(ys.size() == 4);  // y-indices {0, 1, 2, 3}

    CHECK(generate_katz_tao(6).size() == 56);
    CHECK_THROWS_AS(generate_katz_tao(5), error);
    CHECK_THROWS_AS(generate_katz_tao(2), error);
}

TEST_CASE("random regular generator") {
    // s = 2 forces the full grid
    auto full = generate_random_regular(4, 2.0, 4.0, 9);
    CHECK(full.size() == 256);

    // integer branching: exactly 3^k cells at every depth
    const double s3 = std::log2(3.0);
    auto tri = generate_random_regular(7, s3, 4.0, 5);
    CHECK(tri.size() == 2187);
    for (int k = 1; k < 7; ++k) {
        std::map<uint64_t, bool> parents;
        for (uint64_t c : tri.codes) parents[c >> (2 * (7 - k))] = true;
        CHECK(double(parents.size()) == doctest::Approx(std::pow(3.0, k)));
    }

    // determinism in the seed
    auto a = generate_random_regular(8, 1.4, 4.0, 7);
    auto b = generate_random_regular(8, 1.4, 4.0, 7);
    CHECK(a == b);
    auto c = generate_random_regular(8, 1.4, 4.0, 8);
    CHECK(a.codes != c.codes);

    // the verifier confirms the band at the design exponent
    auto rep = regularity_constant(generate_random_regular(10, 1.4, 4.0, 7), 1.4);
    CHECK(rep.C_star <= 8.0);
}

TEST_CASE("set/measure conversions") {
    auto grid = generate_pattern_set(three_quadrant(3));
    auto mu = set_to_measure(grid);
    CHECK(mu.support_size() == 27);
    for (const auto& [code, mass] : mu.cells)
        CHECK(mass == doctest::Approx(1.0 / 27).epsilon(1e-12));
    CHECK(shannon_entropy(mu, 3).bits == doctest::Approx(3 * std::log2(3.0)).epsilon(1e-9));

    // full grid <-> uniform, singleton <-> point mass
    PatternSpec full;
    full.dim = 1;
    full.block_depth = 1;
    full.kept = {{0, 0}, {1, 0}};
    full.levels = 5;
    CHECK(set_to_measure(generate_pattern_set(full)) == uniform_measure(1, 5));
    auto single = GridSet::make(2, 4, {morton_encode(2, 3, 9)});
    auto pm = set_to_measure(single);
    CHECK(pm.support_size() == 1);
    CHECK(measure_to_set(pm) == single);
    CHECK(measure_to_set(uniform_measure(1, 4)).size() == 16);

    // zero-mass region stays out of the support set
    auto partial = DyadicMeasure::make(1, 2, {{0, 0.5}, {3, 0.5}});
    auto back = measure_to_set(partial);
    CHECK(back.size() == 2);
    CHECK(back.contains(0));
    CHECK(!back.contains(1));

    // roundtrip identity on random sets
    rng64 rng(55);
    for (int trial = 0; trial < 25; ++trial) {
        const int dim = 1 + int(rng.below(2));
        auto a = random_set(rng, dim, 6, 40);
        CHECK(measure_to_set(set_to_measure(a)) == a);
    }
}

TEST_CASE("verifier agrees with the naive oracle") {
    std::vector<GridSet> instances;
    instances.push_back(generate_pattern_set(three_quadrant(4)));
    instances.push_back(generate_katz_tao(4));
    instances.push_back(generate_katz_tao(6));
    instances.push_back(generate_katz_tao(8));
    instances.push_back(generate_random_regular(8, 1.4, 4.0, 7));
    PatternSpec full;
    full.dim = 2;
    full.block_depth = 1;
    full.kept = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    full.levels = 4;
    instances.push_back(generate_pattern_set(full));
    rng64 rng(56);
    instances.push_back(random_set(rng, 2, 7, 300));
    instances.push_back(random_set(rng, 1, 10, 200));

    for (const auto& a : instances) {
        check_reports_equal(regularity_constant(a), regularity_constant_naive(a));
        check_reports_equal(regularity_constant(a, 1.0),
                            regularity_constant_naive(a, 1.0));
    }
}

TEST_CASE("katz-tao is 1-regular with small constant") {
    auto rep = regularity_constant(generate_katz_tao(8), 1.0);
    CHECK(rep.s == 1.0);
    CHECK(!rep.fitted);
    CHECK(rep.C_star <= 4.0);

    auto fit = regularity_constant(generate_katz_tao(8));
    CHECK(fit.fitted);
    CHECK(fit.s == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("pattern constants stay bounded across depth") {
    const double s3 = std::log2(3.0);
    double worst = 1.0;
    for (int L : {4, 6, 8}) {
        auto rep = regularity_constant(generate_pattern_set(three_quadrant(L)), s3);
        worst = std::max(worst, rep.C_star);
    }
    CHECK(worst <= 8.0);
}
