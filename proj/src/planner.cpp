#include "bevrisk/planner.hpp"

#include <cmath>
#include <stdexcept>

namespace bevrisk {

namespace {

double cell_distance(Cell a, Cell b) {
  const double dr = a.row - b.row;
  const double dc = a.col - b.col;
  return std::sqrt(dr * dr + dc * dc);
}

}  // namespace

std::string_view terminal_name(Terminal t) {
  switch (t) {
    case Terminal::ReachedTarget: return "ReachedTarget";
    case Terminal::LocalMinimum: return "LocalMinimum";
    case Terminal::StepBudgetExhausted: return "StepBudgetExhausted";
  }
  return "?";
}

Path plan(const PotentialField& field, const EgoState& ego, const TargetPoint& target, const PlannerConfig& cfg) {
  const GridSpec& spec = field.spec;
  if (!spec.contains(ego.cell)) throw std::invalid_argument("ego cell outside the grid");
  const Cell goal = clamp_target(spec, target);

  std::vector<bool> visited(spec.size(), false);
  Path path;
  Cell cur = ego.cell;
  visited[spec.index(cur)] = true;
  path.waypoints.push_back(cur);

  for (int step = 0;; ++step) {
    if (cell_distance(cur, goal) <= cfg.goal_radius) {
      path.terminal = Terminal::ReachedTarget;
      break;
    }
    if (step >= cfg.max_steps) {
      path.terminal = Terminal::StepBudgetExhausted;
      break;
    }
    double best_value = field.at(cur);
    bool found = false;
    Cell best{};
    for (Cell d : kNeighborOrder) {
      const Cell nb{cur.row + d.row, cur.col + d.col};
      if (!spec.contains(nb) || visited[spec.index(nb)]) continue;
      const double v = field.at(nb);
      if (v < best_value) {
        best_value = v;
        best = nb;
        found = true;
      }
    }
    if (!found) {
      path.terminal = Terminal::LocalMinimum;
      break;
    }
    cur = best;
    visited[spec.index(cur)] = true;
    path.waypoints.push_back(cur);
  }
  return path;
}

double ade(const Path& a, const Path& b) {
  if (a.waypoints.empty() || b.waypoints.empty()) throw std::invalid_argument("ade requires non-empty paths");
  const std::size_t n = std::min(a.waypoints.size(), b.waypoints.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += cell_distance(a.waypoints[i], b.waypoints[i]);
  return sum / static_cast<double>(n);
}

double fde(const Path& a, const Path& b) {
  if (a.waypoints.empty() || b.waypoints.empty()) throw std::invalid_argument("fde requires non-empty paths");
  return cell_distance(a.waypoints.back(), b.waypoints.back());
}

}  // namespace bevrisk
