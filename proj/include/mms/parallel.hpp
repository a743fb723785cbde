#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mms {

// Worker cap shared by every parallel loop; 0 means hardware concurrency.
void set_threads(unsigned n);
unsigned threads();

// Runs fn(lo, hi) on at most threads() contiguous blocks covering [0, n).
// The first exception thrown by any block is rethrown after the join.
template <class Fn>
void parallel_blocks(std::size_t n, Fn&& fn) {
  std::size_t t = std::max<std::size_t>(1, std::min<std::size_t>(threads(), n));
  if (t <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t block = (n + t - 1) / t;
  std::exception_ptr err;
  std::size_t err_block = t;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < t; ++w) {
    std::size_t lo = w * block, hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, w, &fn, &err, &err_block, &mu] {
      try {
        fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> g(mu);
        // keep the lowest block's error so the outcome is thread-independent
        if (w < err_block) {
          err = std::current_exception();
          err_block = w;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// fn(i) for i in [0, n). fn must only write to slots owned by i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  parallel_blocks(n, [&fn](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace mms
