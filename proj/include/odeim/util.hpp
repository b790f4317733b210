#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace odeim {

// Deterministic, platform-independent PRNG (splitmix64) for seeded draws.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) / 9007199254740992.0; }

    // uniform in [a, b)
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

private:
    std::uint64_t state_;
};

// Number of worker threads: ODEIM_THREADS caps it, default hardware capped at 8.
inline int thread_budget() {
    if (const char* env = std::getenv("ODEIM_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(hw == 0 ? 1 : std::min(hw, 8u));
}

// Index-parallel loop with deterministic result ordering (each task writes
// only to its own slot).
inline void parallel_for(int count, const std::function<void(int)>& body) {
    const int workers = std::min(thread_budget(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace odeim
