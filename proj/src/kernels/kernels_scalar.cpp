#include <algorithm>
#include <cassert>
#include <cmath>

#include "bevrisk/simd_kernels.hpp"

namespace bevrisk::simd {

namespace {

void accumulate_repulsion(std::span<double> field, std::span<const double> sq_dist, double k,
                          double d_min_sq) {
  assert(field.size() == sq_dist.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double e = k / std::max(sq_dist[i], d_min_sq);
    field[i] = std::max(field[i], e);
  }
}

void attractive_row(std::span<double> out, double row_offset_sq, double target_col, double k) {
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double dc = static_cast<double>(c) - target_col;
    out[c] = k * std::sqrt(row_offset_sq + dc * dc);
  }
}

void add(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  assert(out.size() == a.size() && a.size() == b.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Backend::Scalar, &accumulate_repulsion, &attractive_row, &add};
}

}  // namespace bevrisk::simd
