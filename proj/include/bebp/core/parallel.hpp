#pragma once

#include <cstddef>
#include <functional>

namespace bebp {

// Number of worker threads used by parallel_for; 0 means hardware concurrency.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

// Runs body(i) for i in [0, count). Work is handed out dynamically, so callers
// must write results into per-index slots to stay deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bebp
