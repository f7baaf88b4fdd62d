#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ftscert {

// splitmix64: tiny deterministic generator for sampling in tests and
// diagnostic checks. Not used anywhere the solver's determinism matters.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in [0,1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + int(next() % uint64_t(hi - lo + 1));
    }
};

inline uint64_t fnv1a64(const void* data, size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// Worker cap from FTSCERT_THREADS (0 or 1 means sequential).
int thread_budget();

// Deterministic parallel map: results land by index, so the output does not
// depend on scheduling. Runs sequentially when the budget or n is small.
void parallel_for(size_t n, const std::function<void(size_t)>& body);

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"),
          line(line_), col(col_) {}
};

}  // namespace ftscert
