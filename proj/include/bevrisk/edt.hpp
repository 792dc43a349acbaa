#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bevrisk {

/// Exact squared Euclidean distance transform (separable lower-envelope
/// method). `sites` is a rows x cols row-major mask; the result holds the
/// squared distance in cell units to the nearest nonzero site, or +inf when
/// the mask is empty.
[[nodiscard]] std::vector<double> squared_edt(std::span<const std::uint8_t> sites, int rows, int cols);

/// 1-D pass over a sampled function: out[q] = min_p (q - p)^2 + f[p].
/// Infinite samples are ignored. Scratch buffers must hold n and n + 1 entries.
void squared_edt_1d(std::span<const double> f, std::span<double> out, std::span<int> vertices,
                    std::span<double> boundaries);

}  // namespace bevrisk
