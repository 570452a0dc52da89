#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace seqgap {

// Number of worker threads used when a caller passes threads = 0.
unsigned default_threads();

// Runs body(chunk_index, begin, end) over [0, count) split into fixed-size
// chunks and returns the per-chunk results in chunk order. Chunk boundaries
// depend only on count and chunk_size, so a reduction over the returned vector
// is identical for every thread count. The first exception thrown by any chunk
// is rethrown after all workers have joined.
template <class Result, class Body>
std::vector<Result> parallel_chunks(std::size_t count, std::size_t chunk_size, unsigned threads,
                                    Body&& body) {
  chunk_size = std::max<std::size_t>(chunk_size, 1);
  const std::size_t num_chunks = (count + chunk_size - 1) / chunk_size;
  std::vector<Result> results(num_chunks);
  if (threads == 0) threads = default_threads();
  const std::size_t workers = std::min<std::size_t>(threads, num_chunks);

  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    results[c] = body(c, begin, std::min(count, begin + chunk_size));
  };

  if (workers <= 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) run_chunk(c);
    return results;
  }

  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < num_chunks; c += workers) run_chunk(c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace seqgap
