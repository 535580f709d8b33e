#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace issa {

/// Worker count: `requested` if nonzero, else the ISSA_THREADS environment
/// variable, else the hardware concurrency.
unsigned resolve_workers(unsigned requested);

/// Splits [begin, end) into fixed-size chunks, evaluates `body(lo, hi)` for
/// each on up to `workers` threads, and returns the results in chunk order.
/// Chunk boundaries do not depend on the worker count, so an order-sensitive
/// reduction over the result is reproducible. The first exception (in chunk
/// order) is rethrown after all workers stop.
template <class R, class F>
std::vector<R> run_chunks(std::uint64_t begin, std::uint64_t end, std::uint64_t chunk,
                          unsigned workers, F&& body) {
  if (end <= begin) return {};
  chunk = std::max<std::uint64_t>(chunk, 1);
  const std::uint64_t count = (end - begin + chunk - 1) / chunk;
  std::vector<R> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};

  auto work = [&] {
    for (std::uint64_t c = next++; c < count; c = next++) {
      if (failed.load()) break;
      const std::uint64_t lo = begin + c * chunk;
      const std::uint64_t hi = std::min(end, lo + chunk);
      try {
        results[c] = body(lo, hi);
      } catch (...) {
        errors[c] = std::current_exception();
        failed = true;
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace issa
