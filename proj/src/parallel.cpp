#include "trilin/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace trilin::parallel {

namespace {
std::atomic<unsigned> g_cap{0};
}

void set_thread_cap(unsigned cap) { g_cap.store(cap); }

unsigned thread_cap() {
  unsigned cap = g_cap.load();
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return cap == 0 ? hw : std::min(cap, hw);
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& f) {
  if (n <= 0) return;
  std::int64_t nt = std::min<std::int64_t>(thread_cap(), n);
  if (nt <= 1) {
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }

  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&](std::int64_t lo, std::int64_t hi) {
    try {
      for (std::int64_t i = lo; i < hi; ++i) f(i);
    } catch (...) {
      std::lock_guard lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(nt));
  std::int64_t chunk = n / nt, rem = n % nt, lo = 0;
  for (std::int64_t t = 0; t < nt; ++t) {
    std::int64_t hi = lo + chunk + (t < rem ? 1 : 0);
    threads.emplace_back(worker, lo, hi);
    lo = hi;
  }
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace trilin::parallel
