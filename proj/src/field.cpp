#include "bevrisk/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <cstdint>
#include <string>

#include "bevrisk/edt.hpp"

namespace bevrisk {

double FieldConstants::energy(SemanticLabel l) const {
  switch (l) {
    case SemanticLabel::RoadLine: return k_roadline;
    case SemanticLabel::Vehicle:
    case SemanticLabel::Pedestrian: return k_dynamic;
    case SemanticLabel::OtherStatic: return k_other;
    case SemanticLabel::Free: return 0.0;
  }
  return 0.0;
}

void FieldConstants::validate() const {
  for (double v : {k_roadline, k_dynamic, k_other, k_attractive}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("field constants must be finite and >= 0");
  }
  if (!(d_min > 0.0) || !std::isfinite(d_min)) throw std::invalid_argument("d_min must be > 0");
}

Cell clamp_target(const GridSpec& spec, const TargetPoint& t) {
  const double r = std::clamp(t.row, 0.0, static_cast<double>(spec.rows - 1));
  const double c = std::clamp(t.col, 0.0, static_cast<double>(spec.cols - 1));
  return {static_cast<int>(std::lround(r)), static_cast<int>(std::lround(c))};
}

std::vector<double> render_repulsive(const SemanticGrid& grid, const FieldConstants& c,
                                     const simd::KernelTable& k) {
  const GridSpec& spec = grid.spec();
  std::vector<double> field(spec.size(), 0.0);
  const double d_min_sq = c.d_min * c.d_min;

  // Classes sharing an energy share one transform: K depends only on class.
  struct Level {
    double energy;
    std::uint8_t mask_bits;
  };
  std::vector<Level> levels;
  for (int code = 1; code < kLabelCount; ++code) {
    const double e = c.energy(static_cast<SemanticLabel>(code));
    if (e <= 0.0) continue;
    auto it = std::find_if(levels.begin(), levels.end(), [e](const Level& l) { return l.energy == e; });
    if (it == levels.end()) {
      levels.push_back({e, static_cast<std::uint8_t>(1u << code)});
    } else {
      it->mask_bits |= static_cast<std::uint8_t>(1u << code);
    }
  }

  const auto labels = grid.labels();
  std::vector<std::uint8_t> sites(spec.size());
  for (const Level& level : levels) {
    bool any = false;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      sites[i] = (level.mask_bits >> static_cast<unsigned>(labels[i])) & 1u;
      any = any || sites[i];
    }
    if (!any) continue;
    const std::vector<double> sq = squared_edt(sites, spec.rows, spec.cols);
    k.accumulate_repulsion(field, sq, level.energy, d_min_sq);
  }
  return field;
}

std::vector<double> render_attractive(const GridSpec& spec, const TargetPoint& t, const FieldConstants& c,
                                      const simd::KernelTable& k) {
  std::vector<double> field(spec.size());
  const Cell target = clamp_target(spec, t);
  const auto cols = static_cast<std::size_t>(spec.cols);
  for (int r = 0; r < spec.rows; ++r) {
    const double dr = static_cast<double>(r - target.row);
    k.attractive_row(std::span(field).subspan(static_cast<std::size_t>(r) * cols, cols), dr * dr,
                     static_cast<double>(target.col), c.k_attractive);
  }
  return field;
}

PotentialField render_field_reusing(const SemanticGrid& grid, const std::vector<double>& attractive,
                                    const FieldConstants& c, const simd::KernelTable& k) {
  if (attractive.size() != grid.spec().size()) throw std::invalid_argument("attractive layer does not match grid");
  PotentialField f;
  f.spec = grid.spec();
  f.repulsive = render_repulsive(grid, c, k);
  f.attractive = attractive;
  f.combined.resize(f.spec.size());
  k.add(f.combined, f.repulsive, f.attractive);
  return f;
}

PotentialField render_field(const SemanticGrid& grid, const TargetPoint& t, const FieldConstants& c,
                            const simd::KernelTable& k) {
  return render_field_reusing(grid, render_attractive(grid.spec(), t, c, k), c, k);
}

SemanticGrid remove_instance(const SemanticGrid& grid, InstanceId id) {
  if (!grid.has_instance(id)) {
    throw CounterfactualError("cannot remove instance " + std::to_string(id) + ": not present in grid");
  }
  SemanticGrid out = grid;
  const auto ids = grid.instances();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) out.set(grid.spec().cell_at(i), SemanticLabel::Free, kNoInstance);
  }
  return out;
}

}  // namespace bevrisk
