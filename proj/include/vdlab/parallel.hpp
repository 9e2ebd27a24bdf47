#pragma once

// Serial and OpenMP execution of independent index loops. Results are written
// into per-index slots and any reduction happens afterwards in index order, so
// both paths produce bit-identical output.

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

namespace vdlab {

enum class Exec { Serial, Parallel };

template <typename Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first;
  std::size_t first_index = n;
  std::mutex guard;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      // keep the lowest failing index so the error matches the serial path
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

template <typename T, typename Fn>
std::vector<T> map_indices(std::size_t n, Exec exec, Fn&& fn) {
  std::vector<T> out(n);
  for_each_index(n, exec, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

int max_threads();

}  // namespace vdlab
