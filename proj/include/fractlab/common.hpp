#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fractlab {

// Single exception type for all domain/argument errors; the CLI maps it to
// exit code 2.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

// splitmix64. All seeded sampling goes through this instead of the std
// distributions, whose output is implementation-defined; frozen test values
// must reproduce on any toolchain.
struct rng64 {
    uint64_t state;

    explicit rng64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // modulo bias is ~n/2^64, irrelevant at our ranges
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }

    double unit() { return double(next() >> 11) * 0x1.0p-53; }
};

// Chunked parallel loop: fn(begin, end) over [0, n). Runs inline when a
// single worker suffices. Callers must make chunks independent; deterministic
// outputs are the caller's responsibility (integer merges are order-free).
void parallel_for(size_t n, const std::function<void(size_t, size_t)>& fn);

// take distinct indices drawn from [0, total), sorted ascending. Partial
// Fisher-Yates, so the draw depends only on (total, take, seed).
std::vector<size_t> sample_indices(size_t total, size_t take, uint64_t seed);

// Global worker cap (set from --threads); default = hardware concurrency.
void set_max_threads(int t);
int max_threads();

}  // namespace fractlab
