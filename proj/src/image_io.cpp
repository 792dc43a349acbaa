#include "bevrisk/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace bevrisk {

namespace {

std::ofstream open_image(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image " + path.string());
  return out;
}

std::size_t image_index(const GridSpec& spec, Cell c) {
  const auto y = static_cast<std::size_t>(spec.rows - 1 - c.row);
  return y * static_cast<std::size_t>(spec.cols) + static_cast<std::size_t>(c.col);
}

double unit_level(double v, double saturation) {
  if (!(saturation > 0.0)) return v > 0.0 ? 1.0 : 0.0;
  return std::clamp(v / saturation, 0.0, 1.0);
}

}  // namespace

void write_pgm16(const std::filesystem::path& path, int width, int height, std::span<const std::uint16_t> pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("pixel count does not match image size");
  }
  auto out = open_image(path);
  out << "P5\n" << width << ' ' << height << "\n65535\n";
  for (std::uint16_t p : pixels) {
    const char be[2] = {static_cast<char>(p >> 8), static_cast<char>(p & 0xff)};
    out.write(be, 2);
  }
  if (!out) throw std::runtime_error("failed writing image " + path.string());
}

void write_ppm(const std::filesystem::path& path, int width, int height, std::span<const Rgb> pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("pixel count does not match image size");
  }
  auto out = open_image(path);
  out << "P6\n" << width << ' ' << height << "\n255\n";
  for (const Rgb& p : pixels) out.write(reinterpret_cast<const char*>(p.data()), 3);
  if (!out) throw std::runtime_error("failed writing image " + path.string());
}

std::vector<std::uint16_t> field_to_gray16(const PotentialField& field, double saturation) {
  std::vector<std::uint16_t> px(field.spec.size());
  for (std::size_t i = 0; i < field.combined.size(); ++i) {
    const Cell c = field.spec.cell_at(i);
    px[image_index(field.spec, c)] =
        static_cast<std::uint16_t>(std::lround(unit_level(field.combined[i], saturation) * 65535.0));
  }
  return px;
}

std::vector<Rgb> field_overlay(const PotentialField& field, const SemanticGrid& grid, const Path& path, Cell target,
                               double saturation, const OverlayStyle& style) {
  const GridSpec& spec = field.spec;
  std::vector<Rgb> px(spec.size());
  for (std::size_t i = 0; i < field.combined.size(); ++i) {
    const Cell c = spec.cell_at(i);
    const auto g = static_cast<std::uint8_t>(std::lround(unit_level(field.combined[i], saturation) * 255.0));
    Rgb color{g, g, g};
    if (grid.label(c) == SemanticLabel::Vehicle) color = style.vehicle;
    if (grid.label(c) == SemanticLabel::Pedestrian) color = style.pedestrian;
    px[image_index(spec, c)] = color;
  }
  for (Cell c : path.waypoints) px[image_index(spec, c)] = style.path;
  for (Cell d : {Cell{0, 0}, Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
    const Cell c{target.row + d.row, target.col + d.col};
    if (spec.contains(c)) px[image_index(spec, c)] = style.target;
  }
  return px;
}

}  // namespace bevrisk
