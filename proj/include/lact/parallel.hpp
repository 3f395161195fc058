#pragma once

#include <cstddef>
#include <functional>

namespace lact {

// Global worker count used by parallel_for. 0 selects the hardware default.
void set_thread_count(unsigned count);
unsigned thread_count();

// Runs fn(i) for every i in [begin, end). Indices are split into contiguous
// chunks, one per worker, so each index is visited exactly once and per-index
// results do not depend on the worker count.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace lact
