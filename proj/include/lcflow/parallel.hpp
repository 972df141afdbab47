#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lcflow {

/// Parallel map over [0, n). Each index is written by exactly one thread and
/// per-index work keeps a fixed serial order internally, so all results are
/// bit-identical regardless of thread count.
template <class F>
void parallel_for(std::ptrdiff_t n, F&& f) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#else
  for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#endif
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Sum f(i) over [0, n) using a fixed block decomposition; block partials are
/// combined in index order. The result does not depend on the thread count.
template <class F>
double deterministic_sum(std::ptrdiff_t n, F&& f) {
  constexpr std::ptrdiff_t block = 256;
  const std::ptrdiff_t nb = (n + block - 1) / block;
  std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
  parallel_for(nb, [&](std::ptrdiff_t b) {
    const std::ptrdiff_t end = std::min(n, (b + 1) * block);
    double s = 0.0;
    for (std::ptrdiff_t i = b * block; i < end; ++i) s += f(i);
    partial[static_cast<std::size_t>(b)] = s;
  });
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace lcflow
