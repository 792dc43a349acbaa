#include "bevrisk/edt.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace bevrisk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void squared_edt_1d(std::span<const double> f, std::span<double> out, std::span<int> vertices,
                    std::span<double> boundaries) {
  const int n = static_cast<int>(f.size());
  assert(out.size() == f.size() && vertices.size() >= f.size() && boundaries.size() > f.size());

  // Lower envelope of parabolas rooted at the finite samples.
  int k = -1;
  for (int q = 0; q < n; ++q) {
    const double fq = f[q];
    if (fq == kInf) continue;
    if (k < 0) {
      k = 0;
      vertices[0] = q;
      boundaries[0] = -kInf;
      boundaries[1] = kInf;
      continue;
    }
    const double qq = static_cast<double>(q) * q;
    double s = 0.0;
    for (;;) {
      const int p = vertices[k];
      s = ((fq + qq) - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
      if (s > boundaries[k]) break;
      --k;  // boundaries[0] is -inf, so k never drops below 0 here
    }
    ++k;
    vertices[k] = q;
    boundaries[k] = s;
    boundaries[k + 1] = kInf;
  }

  if (k < 0) {
    for (int q = 0; q < n; ++q) out[q] = kInf;
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (boundaries[k + 1] < q) ++k;
    const int p = vertices[k];
    const double d = static_cast<double>(q - p);
    out[q] = d * d + f[p];
  }
}

std::vector<double> squared_edt(std::span<const std::uint8_t> sites, int rows, int cols) {
  const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  assert(sites.size() == n);
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = sites[i] ? 0.0 : kInf;

  const int longest = rows > cols ? rows : cols;
  std::vector<double> f(longest), out(longest), z(longest + 1);
  std::vector<int> v(longest);

  // Columns first; a column without sites stays infinite.
  for (int c = 0; c < cols; ++c) {
    bool any = false;
    for (int r = 0; r < rows; ++r) {
      f[r] = grid[static_cast<std::size_t>(r) * cols + c];
      any = any || f[r] == 0.0;
    }
    if (!any) continue;
    squared_edt_1d(std::span(f).first(rows), std::span(out).first(rows), v, z);
    for (int r = 0; r < rows; ++r) grid[static_cast<std::size_t>(r) * cols + c] = out[r];
  }
  for (int r = 0; r < rows; ++r) {
    std::span<double> row(grid.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols));
    std::copy(row.begin(), row.end(), f.begin());
    squared_edt_1d(std::span(f).first(cols), row, v, z);
  }
  return grid;
}

}  // namespace bevrisk
