#pragma once

#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops of field rendering. Every backend must produce
// results bit-identical to the scalar reference: only IEEE-exact operations
// (add, mul, div, sqrt, max) are used, in the same order, with no fusing.

namespace bevrisk::simd {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  Backend backend;

  /// field[i] = max(field[i], k / max(sq_dist[i], d_min_sq)). Infinite
  /// distances contribute zero.
  void (*accumulate_repulsion)(std::span<double> field, std::span<const double> sq_dist, double k,
                               double d_min_sq);

  /// out[c] = k * sqrt(row_offset_sq + (c - target_col)^2) for c in [0, out.size()).
  void (*attractive_row)(std::span<double> out, double row_offset_sq, double target_col, double k);

  /// out[i] = a[i] + b[i].
  void (*add)(std::span<double> out, std::span<const double> a, std::span<const double> b);
};

[[nodiscard]] std::string_view backend_name(Backend b);
[[nodiscard]] bool backend_available(Backend b);
/// Backends compiled in and supported by the running CPU, scalar first.
[[nodiscard]] std::vector<Backend> available_backends();

/// Kernel table for `b`; falls back to scalar when `b` is unavailable.
[[nodiscard]] const KernelTable& kernels(Backend b);
/// Best backend for the running CPU, resolved once.
[[nodiscard]] const KernelTable& active_kernels();

namespace detail {
extern const KernelTable kScalarTable;
#if defined(BEVRISK_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace bevrisk::simd
