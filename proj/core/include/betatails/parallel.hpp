#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace betatails {

/// Splits [0, count) into contiguous blocks, runs fn(begin, end) on up to `workers` threads and
/// returns the block results in block order. Results depend only on the split, which is fixed
/// by `blocks`, never on how many threads ran them.
template <class Result, class Fn>
std::vector<Result> run_blocks(std::size_t count, std::size_t blocks, unsigned workers, Fn fn) {
  blocks = std::max<std::size_t>(1, std::min(blocks, std::max<std::size_t>(count, 1)));
  std::vector<Result> results(blocks);
  auto block_begin = [&](std::size_t b) { return count * b / blocks; };
  if (workers <= 1 || blocks == 1) {
    for (std::size_t b = 0; b < blocks; ++b) results[b] = fn(block_begin(b), block_begin(b + 1));
    return results;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t b = w; b < blocks; b += workers) results[b] = fn(block_begin(b), block_begin(b + 1));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace betatails
