#include "ftscert/util.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>

namespace ftscert {

int thread_budget() {
    const char* env = std::getenv("FTSCERT_THREADS");
    if (env && *env) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(size_t n, const std::function<void(size_t)>& body) {
    int workers = std::min<size_t>(static_cast<size_t>(thread_budget()), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace ftscert
