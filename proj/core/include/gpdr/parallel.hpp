#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gpdr {

// Worker count resolution: explicit request, then GPDR_WORKERS, then hardware.
inline int worker_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GPDR_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Work is claimed by index, so any result written to slot i depends only on i,
// never on thread scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  workers = worker_count(workers);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      fn(i);
    }
  };
  std::size_t spawn = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> pool;
  pool.reserve(spawn - 1);
  for (std::size_t t = 1; t < spawn; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
}

// Fixed-chunk reduction: the addition tree depends only on n and the chunk
// size, so totals are bit-identical for any worker count (including one).
template <typename Fn>
double chunked_sum(std::size_t n, int workers, std::size_t chunk, Fn&& term) {
  if (n == 0) return 0.0;
  std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, workers, [&](std::size_t c) {
    double s = 0.0;
    std::size_t hi = std::min(n, (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < hi; ++i) s += term(i);
    partial[c] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace gpdr
