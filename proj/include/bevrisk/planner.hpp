#pragma once

#include <string_view>
#include <vector>

#include "bevrisk/field.hpp"
#include "bevrisk/scene.hpp"

namespace bevrisk {

struct PlannerConfig {
  double goal_radius = 2.0;  // cells
  int max_steps = 400;

  bool operator==(const PlannerConfig&) const = default;
};

enum class Terminal { ReachedTarget, LocalMinimum, StepBudgetExhausted };

[[nodiscard]] std::string_view terminal_name(Terminal t);

struct Path {
  std::vector<Cell> waypoints;
  Terminal terminal = Terminal::LocalMinimum;

  bool operator==(const Path&) const = default;
};

/// Neighbor probe order: N, NE, E, SE, S, SW, W, NW with N = increasing row.
inline constexpr Cell kNeighborOrder[8] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

/// Greedy steepest descent over the combined potential, starting at the ego
/// cell. Each step moves to the unvisited 8-neighbor with the lowest potential
/// strictly below the current cell; the first neighbor in probe order wins ties.
[[nodiscard]] Path plan(const PotentialField& field, const EgoState& ego, const TargetPoint& target,
                        const PlannerConfig& cfg = {});

/// Mean waypoint distance over the first min(|a|, |b|) indices, in cells.
[[nodiscard]] double ade(const Path& a, const Path& b);
/// Distance between final waypoints, in cells.
[[nodiscard]] double fde(const Path& a, const Path& b);

}  // namespace bevrisk
