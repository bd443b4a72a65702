#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bindim::detail {

/// Runs body(worker) for worker = 0 .. workers-1, the first on the calling
/// thread. Rethrows the first exception raised by any worker.
template <typename Body>
void run_workers(unsigned workers, Body&& body) {
  if (workers <= 1) {
    body(0u);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  auto guarded = [&](unsigned w) {
    try {
      body(w);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(guarded, w);
  guarded(0);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace bindim::detail
