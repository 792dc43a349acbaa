#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "bevrisk/field.hpp"
#include "bevrisk/planner.hpp"
#include "bevrisk/scene.hpp"

namespace bevrisk {

using Rgb = std::array<std::uint8_t, 3>;

/// Binary P5, maxval 65535, big-endian samples.
void write_pgm16(const std::filesystem::path& path, int width, int height, std::span<const std::uint16_t> pixels);
/// Binary P6, maxval 255.
void write_ppm(const std::filesystem::path& path, int width, int height, std::span<const Rgb> pixels);

// Images put row 0 (the ego) at the bottom, so forward points up.

/// Combined field scaled linearly to 16 bits, saturating at `saturation`.
[[nodiscard]] std::vector<std::uint16_t> field_to_gray16(const PotentialField& field, double saturation);

struct OverlayStyle {
  Rgb vehicle{40, 90, 255};
  Rgb pedestrian{255, 40, 40};
  Rgb path{40, 220, 60};
  Rgb target{255, 220, 0};
};

/// Grayscale field background, instance cells tinted by class, the planned
/// path, and a plus-shaped marker at the target.
[[nodiscard]] std::vector<Rgb> field_overlay(const PotentialField& field, const SemanticGrid& grid,
                                             const Path& path, Cell target, double saturation,
                                             const OverlayStyle& style = {});

}  // namespace bevrisk
