#pragma once

#include <atomic>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace mfunc {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

//! Runs fn(begin, end, chunk_index) over fixed-size chunks of [0, total).
//! Chunk boundaries depend only on (total, chunk), never on the thread
//! count, so writers into disjoint slices produce identical results for
//! any number of workers.
inline void parallel_chunks(std::size_t total, std::size_t chunk, unsigned threads,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (total == 0) return;
  if (chunk == 0) chunk = 1;
  const std::size_t n_chunks = (total + chunk - 1) / chunk;
  threads = resolve_threads(threads);
  if (threads <= 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c)
      fn(c * chunk, std::min(total, (c + 1) * chunk), c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      fn(c * chunk, std::min(total, (c + 1) * chunk), c);
    }
  };
  std::vector<std::thread> pool;
  unsigned n = std::min<std::size_t>(threads, n_chunks);
  pool.reserve(n);
  for (unsigned i = 0; i + 1 < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

inline std::size_t chunk_count(std::size_t total, std::size_t chunk) {
  if (chunk == 0) chunk = 1;
  return (total + chunk - 1) / chunk;
}

//! Fixed-order pairwise summation; result is independent of how the work
//! that produced `v` was scheduled.
template <typename T>
T pairwise_sum(std::span<const T> v) {
  if (v.empty()) return T{};
  if (v.size() <= 8) {
    T s = v[0];
    for (std::size_t i = 1; i < v.size(); ++i) s += v[i];
    return s;
  }
  std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v));
}

}  // namespace mfunc
