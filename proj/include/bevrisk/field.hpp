#pragma once

#include <stdexcept>
#include <vector>

#include "bevrisk/scene.hpp"
#include "bevrisk/simd_kernels.hpp"

namespace bevrisk {

/// Field energies in cell units. Distances below d_min are clamped to d_min,
/// so obstacle cells carry k / d_min^2 instead of diverging.
struct FieldConstants {
  double k_roadline = 400.0;
  double k_dynamic = 1000.0;
  double k_other = 0.0;
  double k_attractive = 0.75;
  double d_min = 1.0;

  [[nodiscard]] double energy(SemanticLabel l) const;
  /// Throws std::invalid_argument when any constant is negative or d_min <= 0.
  void validate() const;

  bool operator==(const FieldConstants&) const = default;
};

struct PotentialField {
  GridSpec spec;
  std::vector<double> repulsive;
  std::vector<double> attractive;
  std::vector<double> combined;

  [[nodiscard]] double at(Cell c) const { return combined[spec.index(c)]; }
  [[nodiscard]] double repulsive_at(Cell c) const { return repulsive[spec.index(c)]; }
};

/// Raised when a counterfactual names an instance that is not in the grid.
class CounterfactualError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Target clamped into the grid and snapped to the nearest cell.
[[nodiscard]] Cell clamp_target(const GridSpec& spec, const TargetPoint& t);

/// max over source cells q of K(q) / max(ED(p, q), d_min)^2, zero without sources.
/// One exact distance transform per energy level; zero-energy classes are skipped.
[[nodiscard]] std::vector<double> render_repulsive(const SemanticGrid& grid, const FieldConstants& c,
                                                   const simd::KernelTable& k = simd::active_kernels());

/// k_attractive * ED(target, p), exactly zero at the clamped target cell.
[[nodiscard]] std::vector<double> render_attractive(const GridSpec& spec, const TargetPoint& t,
                                                    const FieldConstants& c,
                                                    const simd::KernelTable& k = simd::active_kernels());

[[nodiscard]] PotentialField render_field(const SemanticGrid& grid, const TargetPoint& t, const FieldConstants& c,
                                          const simd::KernelTable& k = simd::active_kernels());

/// Combines a precomputed attractive layer with a fresh repulsive render.
[[nodiscard]] PotentialField render_field_reusing(const SemanticGrid& grid, const std::vector<double>& attractive,
                                          const FieldConstants& c,
                                          const simd::KernelTable& k = simd::active_kernels());

/// Copy of `grid` with every cell of `id` set to Free. Throws CounterfactualError
/// when the instance is absent.
[[nodiscard]] SemanticGrid remove_instance(const SemanticGrid& grid, InstanceId id);

}  // namespace bevrisk
