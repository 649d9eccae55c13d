#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace dlab::parallel {

/// Worker count used by every parallel routine. Initialized from the
/// DLAB_THREADS environment variable (falls back to 1).
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, count) on up to thread_count() workers. Work
/// is split by index, never by worker, so callers that store per-index
/// results and reduce them in index order get bit-identical output for
/// any worker count. On failure the exception from the smallest failing
/// index is rethrown.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body);

/// Convenience: evaluate fn(i) for every index and return results in index order.
template <typename T, typename Fn>
std::vector<T> map_indices(std::size_t count, Fn&& fn) {
  std::vector<T> out(count);
  for_each_index(count, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace dlab::parallel
