#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace octaframe
{

/// Worker count: OCTAFRAME_THREADS if set to a positive integer, else the
/// hardware concurrency.
inline unsigned thread_count()
{
  if (const char *env = std::getenv("OCTAFRAME_THREADS"))
  {
    char *end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0)
      return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) over contiguous chunks.  Bodies must write
/// only to slots owned by i; any reduction happens afterwards in fixed order.
template <class Body>
void parallel_for(std::size_t n, Body &&body)
{
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w)
  {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi)
      break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i)
        body(i);
    });
  }
}

/// Pairwise (tree) summation; the association order depends only on the length.
inline double pairwise_sum(std::span<const double> v)
{
  if (v.size() <= 8)
  {
    double s = 0.0;
    for (double x : v)
      s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

} // namespace octaframe
