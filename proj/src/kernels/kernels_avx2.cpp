#include <immintrin.h>

#include <algorithm>
#include <cassert>
#include <cmath>

#include "bevrisk/simd_kernels.hpp"

namespace bevrisk::simd {

namespace {

// Lane order matches the scalar loop; tails fall through to scalar code.

void accumulate_repulsion(std::span<double> field, std::span<const double> sq_dist, double k,
                          double d_min_sq) {
  assert(field.size() == sq_dist.size());
  const std::size_t n = field.size();
  const __m256d vk = _mm256_set1_pd(k);
  const __m256d vmin = _mm256_set1_pd(d_min_sq);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_max_pd(_mm256_loadu_pd(sq_dist.data() + i), vmin);
    const __m256d e = _mm256_div_pd(vk, d);
    const __m256d cur = _mm256_loadu_pd(field.data() + i);
    _mm256_storeu_pd(field.data() + i, _mm256_max_pd(cur, e));
  }
  for (; i < n; ++i) {
    const double e = k / std::max(sq_dist[i], d_min_sq);
    field[i] = std::max(field[i], e);
  }
}

void attractive_row(std::span<double> out, double row_offset_sq, double target_col, double k) {
  const std::size_t n = out.size();
  const __m256d vk = _mm256_set1_pd(k);
  const __m256d vrow = _mm256_set1_pd(row_offset_sq);
  const __m256d vt = _mm256_set1_pd(target_col);
  const __m256d step = _mm256_set1_pd(4.0);
  __m256d cols = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  std::size_t c = 0;
  for (; c + 4 <= n; c += 4) {
    const __m256d dc = _mm256_sub_pd(cols, vt);
    const __m256d s = _mm256_add_pd(vrow, _mm256_mul_pd(dc, dc));
    _mm256_storeu_pd(out.data() + c, _mm256_mul_pd(vk, _mm256_sqrt_pd(s)));
    cols = _mm256_add_pd(cols, step);
  }
  for (; c < n; ++c) {
    const double dc = static_cast<double>(c) - target_col;
    out[c] = k * std::sqrt(row_offset_sq + dc * dc);
  }
}

void add(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  assert(out.size() == a.size() && a.size() == b.size());
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{Backend::Avx2, &accumulate_repulsion, &attractive_row, &add};
}

}  // namespace bevrisk::simd
