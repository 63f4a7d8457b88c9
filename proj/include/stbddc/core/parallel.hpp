#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace stbddc {

/// Name of the environment variable overriding the worker count.
inline constexpr const char* kThreadsEnvVar = "STBDDC_NUM_THREADS";

/// Worker count: STBDDC_NUM_THREADS if set to a positive integer, else 1.
inline int thread_count() {
  if (const char* env = std::getenv(kThreadsEnvVar)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 256));
  }
  return 1;
}

/// Runs f(i) for i in [0, n). Iterations must be independent. The first
/// exception thrown by any worker is rethrown on the calling thread.
template <class F>
void parallel_for(int n, F&& f, int threads = thread_count()) {
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads) f(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace stbddc
