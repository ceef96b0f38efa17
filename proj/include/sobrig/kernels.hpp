#pragma once

// Grid-map kernels. Every parallel kernel has a serial twin that is kept as
// the reference: each element is computed by the same code path in both, so
// results are bitwise identical and the order of the output never depends on
// scheduling. Reductions stay serial.

#include <exception>
#include <span>
#include <vector>

#include <omp.h>

namespace sobrig {

enum class Exec { serial, parallel };

template <class T, class F>
std::vector<T> map_indexed_serial(std::size_t n, F&& f) {
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
  return out;
}

template <class T, class F>
std::vector<T> map_indexed_parallel(std::size_t n, F&& f) {
  std::vector<T> out(n);
  std::exception_ptr failure;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(sobrig_map_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

template <class T, class F>
std::vector<T> map_indexed(std::size_t n, F&& f, Exec exec) {
  if (exec == Exec::parallel && n > 1) return map_indexed_parallel<T>(n, std::forward<F>(f));
  return map_indexed_serial<T>(n, std::forward<F>(f));
}

/// out[i] = f(xs[i]).
template <class F>
std::vector<double> map_grid(std::span<const double> xs, F&& f, Exec exec) {
  return map_indexed<double>(
      xs.size(), [&](std::size_t i) { return f(xs[i]); }, exec);
}

inline int worker_count() { return omp_get_max_threads(); }

}  // namespace sobrig
