#include "doctest.h"

#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "fractlab/io.hpp"

using namespace fractlab;

namespace {

GridSet random_set(rng64& rng, int dim, int scale, size_t n) {
    std::set<uint64_t> codes;
    const uint64_t cap = uint64_t(1) << (dim * scale);
    while (codes.size() < n) codes.insert(rng.below(cap));
    return GridSet::make(dim, scale,
                         std::vector<uint64_t>(codes.begin(), codes.end()));
}

std::string what_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("gridset text roundtrip") {
    rng64 rng(81);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 1 + int(rng.below(2));
        auto a = random_set(rng, dim, 8, 1 + rng.below(100));
        std::ostringstream out;
        write_gridset(out, a);
        std::istringstream in(out.str());
        CHECK(read_gridset(in) == a);
    }
}

TEST_CASE("gridset parser details") {
    std::istringstream ok("# comment\n\n2 3\n0 0\n7 5\n\n3 3\n");
    auto a = read_gridset(ok, "demo.txt");
    CHECK(a.size() == 3);
    CHECK(a.scale == 3);
    CHECK(a.contains(morton_encode(2, 7, 5)));

    // windows line endings
    std::istringstream crlf("1 4\r\n9\r\n3\r\n");
    CHECK(read_gridset(crlf).size() == 2);

    // errors carry origin and line number
    std::istringstream dup("2 3\n1 1\n1 1\n");
    CHECK(what_of([&] { read_gridset(dup, "f.txt"); }).find("f.txt:3") !=
          std::string::npos);

    std::istringstream range("2 3\n8 0\n");
    CHECK(what_of([&] { read_gridset(range, "f.txt"); }).find("f.txt:2") !=
          std::string::npos);

    std::istringstream header("5 3\n");
    CHECK(what_of([&] { read_gridset(header, "f.txt"); }).find("f.txt:1") !=
          std::string::npos);

    std::istringstream trailing("2 3\n1 1 9\n");
    CHECK(what_of([&] { read_gridset(trailing, "f.txt"); }).find("trailing") !=
          std::string::npos);

    std::istringstream empty("2 3\n");
    CHECK_THROWS_AS(read_gridset(empty), error);
}

TEST_CASE("measure text roundtrip preserves masses") {
    rng64 rng(82);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 1 + int(rng.below(2));
        std::vector<std::pair<uint64_t, double>> cells;
        std::set<uint64_t> used;
        const uint64_t cap = uint64_t(1) << (dim * 8);
        while (used.size() < 30) {
            const uint64_t c = rng.below(cap);
            if (used.insert(c).second) cells.emplace_back(c, 0.01 + rng.unit());
        }
        auto mu = DyadicMeasure::make(dim, 8, std::move(cells));

        std::ostringstream out;
        write_measure(out, mu);
        std::istringstream in(out.str());
        auto back = read_measure(in);
        REQUIRE(back.cells.size() == mu.cells.size());
        CHECK(std::abs(back.total_mass() - 1.0) <= 1e-12);
        for (size_t i = 0; i < mu.cells.size(); ++i) {
            CHECK(back.cells[i].first == mu.cells[i].first);
            CHECK(back.cells[i].second ==
                  doctest::Approx(mu.cells[i].second).epsilon(1e-12));
        }
    }
}

TEST_CASE("measure parser details") {
    std::istringstream ok("1 3\n0 0.5\n5 1.5\n");
    auto mu = read_measure(ok);
    CHECK(mu.depth == 3);
    CHECK(mu.cells[0].second == doctest::Approx(0.25));

    std::istringstream badmass("1 3\n0 -2\n");
    CHECK(what_of([&] { read_measure(badmass, "m.txt"); }).find("m.txt:2") !=
          std::string::npos);

    std::istringstream badcode("1 3\n8 1\n");
    CHECK_THROWS_AS(read_measure(badcode), error);

    std::istringstream nonnum("1 3\nx 1\n");
    CHECK_THROWS_AS(read_measure(nonnum), error);
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, std::ldexp(1.0, -52), 1e300, 0.0, -2.75,
                     0.30000000000000004}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("csv_field quotes when needed") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
}
