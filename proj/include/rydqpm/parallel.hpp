#pragma once

// Deterministic parallel map-reduce over Monte Carlo samples.
//
// Samples are grouped into fixed-size blocks. Each block accumulates its own
// partial sums in sample order; block partials are then combined serially in
// block order. The summation tree depends only on the sample count, so the
// result is bit-identical for 1 thread, N threads, or the serial reference
// path in reference.hpp.

#include <cstddef>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rydqpm {

inline constexpr std::size_t kReductionBlock = 1024;

inline int hardware_workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Mean over `n_items` of a vector-valued kernel.
///
/// `kernel(i, acc)` must add item i's contribution into acc (length n_out).
/// `n_workers` <= 0 uses the OpenMP default. Returns sums / n_items.
template <typename Kernel>
std::vector<double> blocked_mean(std::size_t n_items, std::size_t n_out,
                                 Kernel&& kernel, int n_workers = 0) {
  const std::size_t n_blocks = (n_items + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partials(n_blocks * n_out, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    num_threads(n_workers > 0 ? n_workers : omp_get_max_threads())
#endif
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
    double* acc = partials.data() + static_cast<std::size_t>(b) * n_out;
    const std::size_t begin = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t end =
        begin + kReductionBlock < n_items ? begin + kReductionBlock : n_items;
    for (std::size_t i = begin; i < end; ++i) kernel(i, acc);
  }
  (void)n_workers;

  std::vector<double> out(n_out, 0.0);
  for (std::size_t b = 0; b < n_blocks; ++b)
    for (std::size_t j = 0; j < n_out; ++j)
      out[j] += partials[b * n_out + j];
  for (double& v : out) v /= static_cast<double>(n_items);
  return out;
}

namespace reference {

/// Serial reference of blocked_mean: same block-shaped summation tree,
/// executed sequentially. Kept for tests and the benchmark target.
template <typename Kernel>
std::vector<double> blocked_mean(std::size_t n_items, std::size_t n_out,
                                 Kernel&& kernel) {
  const std::size_t n_blocks = (n_items + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> block_acc(n_out);
  std::vector<double> out(n_out, 0.0);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    std::fill(block_acc.begin(), block_acc.end(), 0.0);
    const std::size_t begin = b * kReductionBlock;
    const std::size_t end =
        begin + kReductionBlock < n_items ? begin + kReductionBlock : n_items;
    for (std::size_t i = begin; i < end; ++i) kernel(i, block_acc.data());
    for (std::size_t j = 0; j < n_out; ++j) out[j] += block_acc[j];
  }
  for (double& v : out) v /= static_cast<double>(n_items);
  return out;
}

/// Naive straight-sum reference (different rounding tree, used by tests as
/// an order-independent cross-check within tolerance).
template <typename Kernel>
std::vector<double> naive_mean(std::size_t n_items, std::size_t n_out,
                               Kernel&& kernel) {
  std::vector<double> out(n_out, 0.0);
  for (std::size_t i = 0; i < n_items; ++i) kernel(i, out.data());
  for (double& v : out) v /= static_cast<double>(n_items);
  return out;
}

}  // namespace reference
}  // namespace rydqpm
