#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace mgan::runtime {

// Worker count used by parallel_for. 0 selects std::thread::hardware_concurrency().
void set_thread_count(int n);
int thread_count();

// Splits [0, n) into contiguous chunks, one per worker, and runs fn(begin, end)
// on each. Chunks never overlap, so callers that only write inside their range
// produce bit-identical results for any thread count. Small ranges run inline.
void parallel_for(std::size_t n, std::size_t min_items_per_thread,
                  const std::function<void(std::size_t, std::size_t)>& fn);

// When enabled, ops verify their outputs are finite and throw on NaN/Inf.
void set_debug_checks(bool on);
bool debug_checks();

// Deduplicated warning sink (stderr). Repeat messages with the same key print once.
void warn_once(const std::string& key, const std::string& message);

}  // namespace mgan::runtime
