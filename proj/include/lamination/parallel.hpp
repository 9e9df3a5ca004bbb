#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace lam {

// Runs fn(begin, end, chunk) over `chunks` contiguous pieces of [0, n) on up
// to `jobs` threads.  Chunk boundaries depend only on n and `chunks`, so
// callers that reduce per-chunk results in chunk order are deterministic for
// any job count.
template <typename Fn>
void parallel_chunks(std::size_t n, std::size_t chunks, unsigned jobs, Fn&& fn) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n == 0 ? 1 : n));
  auto bounds = [&](std::size_t c) { return std::pair{n * c / chunks, n * (c + 1) / chunks}; };
  if (jobs <= 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      const auto [b, e] = bounds(c);
      fn(b, e, c);
    }
    return;
  }
  std::vector<std::thread> pool;
  const unsigned workers = std::min<unsigned>(jobs, static_cast<unsigned>(chunks));
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += workers) {
        const auto [b, e] = bounds(c);
        fn(b, e, c);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace lam
