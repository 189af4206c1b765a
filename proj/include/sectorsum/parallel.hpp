#pragma once

// Index-parallel loops with deterministic result placement, plus pairwise
// summation so reductions do not depend on the thread count.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sectorsum {

/// Worker count: SECTORSUM_THREADS if set and positive, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n). The first exception thrown by any worker is
/// rethrown on the calling thread after all workers have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) sum. The association order depends only on the length.
template <typename T>
T pairwise_sum(std::span<const T> terms) {
  if (terms.size() == 1) return terms[0];
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& terms, T zero) {
  if (terms.empty()) return zero;
  return pairwise_sum(std::span<const T>(terms));
}

}  // namespace sectorsum
