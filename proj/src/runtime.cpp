#include "mgan/runtime.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>
#include <unordered_set>
#include <vector>

namespace mgan::runtime {

namespace {
std::atomic<int> g_threads{0};
std::atomic<bool> g_debug_checks{false};
std::mutex g_warn_mutex;
std::unordered_set<std::string>& warned_keys() {
    static std::unordered_set<std::string> keys;
    return keys;
}
}  // namespace

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
    int n = g_threads.load();
    if (n == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return n;
}

void parallel_for(std::size_t n, std::size_t min_items_per_thread,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = static_cast<std::size_t>(thread_count());
    if (min_items_per_thread > 0) {
        workers = std::min(workers, n / min_items_per_thread + 1);
    }
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
        std::size_t begin = w * chunk;
        if (begin >= n) break;
        std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back(fn, begin, end);
    }
    fn(0, std::min(n, chunk));
    for (auto& t : pool) t.join();
}

void set_debug_checks(bool on) { g_debug_checks.store(on); }
bool debug_checks() { return g_debug_checks.load(); }

void warn_once(const std::string& key, const std::string& message) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    if (warned_keys().insert(key).second) {
        std::fprintf(stderr, "mgan: warning: %s\n", message.c_str());
    }
}

}  // namespace mgan::runtime
