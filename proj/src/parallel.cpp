#include "fhops/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace fhops::par {

int resolve_threads(int requested) {
  if (requested <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    requested = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return std::clamp(requested, 1, 256);
}

std::vector<std::pair<std::int64_t, std::int64_t>> split_range(
    std::int64_t begin, std::int64_t end, std::int64_t pieces) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (end <= begin || pieces <= 0) return out;
  std::int64_t total = end - begin;
  pieces = std::min(pieces, total);
  std::int64_t base = total / pieces;
  std::int64_t extra = total % pieces;
  std::int64_t cursor = begin;
  out.reserve(static_cast<std::size_t>(pieces));
  for (std::int64_t p = 0; p < pieces; ++p) {
    std::int64_t len = base + (p < extra ? 1 : 0);
    out.emplace_back(cursor, cursor + len);
    cursor += len;
  }
  return out;
}

void for_pieces(std::int64_t piece_count, int threads,
                const std::function<void(std::int64_t)>& fn) {
  if (piece_count <= 0) return;
  threads = std::min<std::int64_t>(resolve_threads(threads), piece_count);
  if (threads == 1) {
    for (std::int64_t p = 0; p < piece_count; ++p) fn(p);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex errorLock;

  auto worker = [&] {
    for (;;) {
      std::int64_t p = next.fetch_add(1, std::memory_order_relaxed);
      if (p >= piece_count) return;
      try {
        fn(p);
      } catch (...) {
        std::lock_guard<std::mutex> hold(errorLock);
        if (!error) error = std::current_exception();
        next.store(piece_count, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fhops::par
