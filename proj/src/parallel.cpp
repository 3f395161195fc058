#include "lact/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace lact {

namespace {

std::atomic<unsigned> g_thread_count{0};

unsigned resolved_count() {
  unsigned n = g_thread_count.load(std::memory_order_relaxed);
  if (n == 0) n = std::thread::hardware_concurrency();
  return std::max(1u, n);
}

}  // namespace

void set_thread_count(unsigned count) {
  g_thread_count.store(count, std::memory_order_relaxed);
}

unsigned thread_count() { return resolved_count(); }

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
  if (begin >= end) return;
  const std::size_t total = end - begin;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolved_count(), total));
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (total + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  const std::size_t first_hi = std::min(end, begin + chunk);
  for (std::size_t i = begin; i < first_hi; ++i) fn(i);
  for (auto& t : pool) t.join();
}

}  // namespace lact
