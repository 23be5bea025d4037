#include "fractlab/common.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace fractlab {

namespace {
std::atomic<int> g_max_threads{0};  // 0 = use hardware concurrency
}

void set_max_threads(int t) { g_max_threads.store(t > 0 ? t : 0); }

int max_threads() {
    int cap = g_max_threads.load();
    int hw = int(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    return cap > 0 ? std::min(cap, hw) : hw;
}

std::vector<size_t> sample_indices(size_t total, size_t take, uint64_t seed) {
    require(take <= total, "sample size exceeds the population");
    std::vector<size_t> idx(total);
    for (size_t i = 0; i < total; ++i) idx[i] = i;
    rng64 rng(seed);
    for (size_t i = 0; i < take; ++i)
        std::swap(idx[i], idx[i + rng.below(total - i)]);
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void parallel_for(size_t n, const std::function<void(size_t, size_t)>& fn) {
    if (n == 0) return;
    size_t workers = size_t(max_threads());
    if (workers <= 1 || n < 2 * workers) {
        fn(0, n);
        return;
    }
    size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        size_t lo = w * chunk;
        if (lo >= n) break;
        size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace fractlab
