#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace blisterlab {

// Evaluates fn(0..count-1) on up to `workers` threads; results come back in index order, so
// the output never depends on scheduling. The first failing index (lowest) is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int workers, Fn&& fn) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> err(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, int(count)));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

// Worker count from BLISTERLAB_WORKERS, else 1.
inline int default_workers() {
  if (const char* v = std::getenv("BLISTERLAB_WORKERS")) {
    try {
      const int n = std::stoi(v);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return 1;
}

}  // namespace blisterlab
