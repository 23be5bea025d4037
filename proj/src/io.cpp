#include "fractlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fractlab {

namespace {

[[noreturn]] void parse_fail(const std::string& origin, size_t line,
                             const std::string& msg) {
    fail(origin + ":" + std::to_string(line) + ": " + msg);
}

// Next non-blank, non-comment line; returns false at EOF.
bool content_line(std::istream& in, std::string& line, size_t& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const size_t i = line.find_first_not_of(" \t");
        if (i == std::string::npos || line[i] == '#') continue;
        return true;
    }
    return false;
}

struct cursor {
    const char* p;
    const char* end;
    const std::string& origin;
    size_t line;

    void skip_ws() {
        while (p < end && (*p == ' ' || *p == '\t')) ++p;
    }

    bool done() {
        skip_ws();
        return p == end;
    }

    uint64_t take_u64(const char* what) {
        skip_ws();
        uint64_t v = 0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc() || next == p)
            parse_fail(origin, line, std::string("expected ") + what);
        p = next;
        return v;
    }

    double take_double(const char* what) {
        skip_ws();
        double v = 0.0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc() || next == p)
            parse_fail(origin, line, std::string("expected ") + what);
        p = next;
        return v;
    }

    void finish() {
        if (!done()) parse_fail(origin, line, "trailing characters");
    }
};

cursor over(const std::string& s, const std::string& origin, size_t line) {
    return cursor{s.data(), s.data() + s.size(), origin, line};
}

std::pair<int, int> read_header(std::istream& in, const std::string& origin,
                                size_t& lineno) {
    std::string line;
    if (!content_line(in, line, lineno)) parse_fail(origin, lineno + 1, "missing header");
    cursor c = over(line, origin, lineno);
    const uint64_t d = c.take_u64("dimension");
    const uint64_t n = c.take_u64("scale");
    c.finish();
    if (d != 1 && d != 2) parse_fail(origin, lineno, "dimension must be 1 or 2");
    if (n < 1 || d * n > 48) parse_fail(origin, lineno, "scale out of supported range");
    return {int(d), int(n)};
}

// Duplicate detection that can still name the offending line.
void check_duplicates(std::vector<std::pair<uint64_t, size_t>>& seen,
                      const std::string& origin, const char* what) {
    std::sort(seen.begin(), seen.end());
    for (size_t i = 1; i < seen.size(); ++i)
        if (seen[i].first == seen[i - 1].first)
            parse_fail(origin, seen[i].second, std::string("duplicate ") + what);
}

}  // namespace

GridSet read_gridset(std::istream& in, const std::string& origin) {
    size_t lineno = 0;
    auto [dim, scale] = read_header(in, origin, lineno);
    const uint64_t limit = uint64_t(1) << scale;
    std::vector<std::pair<uint64_t, size_t>> seen;
    std::string line;
    while (content_line(in, line, lineno)) {
        cursor c = over(line, origin, lineno);
        uint64_t jx = c.take_u64("grid index");
        uint64_t jy = 0;
        if (dim == 2) jy = c.take_u64("second grid index");
        c.finish();
        if (jx >= limit || jy >= limit)
            parse_fail(origin, lineno, "point outside the grid");
        seen.emplace_back(morton_encode(dim, jx, jy), lineno);
    }
    if (seen.empty()) parse_fail(origin, lineno + 1, "no points");
    check_duplicates(seen, origin, "point");
    std::vector<uint64_t> codes(seen.size());
    for (size_t i = 0; i < seen.size(); ++i) codes[i] = seen[i].first;
    return GridSet::make(dim, scale, std::move(codes));
}

GridSet load_gridset(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open " + path);
    return read_gridset(in, path);
}

void write_gridset(std::ostream& out, const GridSet& a) {
    out << a.dim << ' ' << a.scale << '\n';
    for (size_t i = 0; i < a.size(); ++i) {
        const auto p = a.point(i);
        if (a.dim == 2)
            out << p[0] << ' ' << p[1] << '\n';
        else
            out << p[0] << '\n';
    }
}

void save_gridset(const std::string& path, const GridSet& a) {
    std::ofstream out(path);
    require(out.good(), "cannot open " + path + " for writing");
    write_gridset(out, a);
    require(bool(out.flush()), "write failed: " + path);
}

DyadicMeasure read_measure(std::istream& in, const std::string& origin) {
    size_t lineno = 0;
    auto [dim, depth] = read_header(in, origin, lineno);
    const uint64_t limit = uint64_t(1) << (dim * depth);
    std::vector<std::pair<uint64_t, size_t>> seen;
    std::vector<std::pair<uint64_t, double>> cells;
    std::string line;
    while (content_line(in, line, lineno)) {
        cursor c = over(line, origin, lineno);
        const uint64_t code = c.take_u64("cell code");
        const double mass = c.take_double("mass");
        c.finish();
        if (code >= limit) parse_fail(origin, lineno, "cell code outside the grid");
        if (!(mass > 0.0) || !std::isfinite(mass))
            parse_fail(origin, lineno, "mass must be a positive finite number");
        seen.emplace_back(code, lineno);
        cells.emplace_back(code, mass);
    }
    if (cells.empty()) parse_fail(origin, lineno + 1, "no cells");
    check_duplicates(seen, origin, "cell code");
    return DyadicMeasure::make(dim, depth, std::move(cells));
}

DyadicMeasure load_measure(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open " + path);
    return read_measure(in, path);
}

void write_measure(std::ostream& out, const DyadicMeasure& mu) {
    out << mu.dim << ' ' << mu.depth << '\n';
    for (const auto& [code, mass] : mu.cells)
        out << code << ' ' << format_double(mass) << '\n';
}

void save_measure(const std::string& path, const DyadicMeasure& mu) {
    std::ofstream out(path);
    require(out.good(), "cannot open " + path + " for writing");
    write_measure(out, mu);
    require(bool(out.flush()), "write failed: " + path);
}

std::string format_double(double v) {
    char buf[40];
    // shortest representation that survives the roundtrip
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace fractlab
