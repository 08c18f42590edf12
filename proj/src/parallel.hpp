#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pickands {

// Replications are reduced in blocks of this size regardless of worker count.
inline constexpr std::int64_t kBlockSize = 1024;

// Worker count: explicit override, else PICKANDS_THREADS, else hardware.
int worker_count();
void set_worker_count(int threads);  // 0 restores the default lookup

// Calls fn(begin, end) -> Acc for consecutive blocks of [0, n) and returns the
// per-block results in block order. Scheduling never affects the values.
template <class Acc, class Fn>
std::vector<Acc> map_blocks(std::int64_t n, Fn&& fn, std::int64_t block = kBlockSize) {
  const std::int64_t blocks = n <= 0 ? 0 : (n + block - 1) / block;
  std::vector<Acc> out(static_cast<std::size_t>(blocks));
  const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), blocks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run = [&] {
    for (;;) {
      const std::int64_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        const std::int64_t begin = b * block;
        out[static_cast<std::size_t>(b)] = fn(begin, std::min(n, begin + block));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks);
      }
    }
  };

  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace pickands
