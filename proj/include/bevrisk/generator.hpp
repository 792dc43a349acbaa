#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "bevrisk/risk.hpp"
#include "bevrisk/scene.hpp"

namespace bevrisk {

enum class ScenarioKind { BlockingPedestrian, BlockingVehicle, OppositeLane, InteractionFree, Jaywalker, BoxedIn };

inline constexpr std::array kAllScenarioKinds{
    ScenarioKind::BlockingPedestrian, ScenarioKind::BlockingVehicle, ScenarioKind::OppositeLane,
    ScenarioKind::InteractionFree,    ScenarioKind::Jaywalker,       ScenarioKind::BoxedIn,
};

/// Kebab-case name, e.g. "opposite-lane".
[[nodiscard]] std::string_view kind_name(ScenarioKind k);
/// Accepts kebab-case or CamelCase names.
[[nodiscard]] std::optional<ScenarioKind> parse_kind(std::string_view s);

struct GeneratorConfig {
  std::uint64_t seed = 0;
  ScenarioKind kind = ScenarioKind::InteractionFree;
  int frame_count = 40;
  int lane_width = 8;   // cells; rounded down to even
  double jitter = 1.0;  // cells of random perturbation on agent placement
  double ego_speed = 2.5;  // m/s, constant
  double fps = 20.0;
  int window = kDefaultWindow;
  GridSpec spec;
};

/// Straight two-lane road with scripted agents. The ego drives the right lane
/// centered on the ego column; the opposite lane lies toward lower columns.
/// Agents move in straight lines at constant rates in the ego frame. The
/// target is the ego position 3 s ahead. Throws std::invalid_argument when the
/// road or agents do not fit the grid.
[[nodiscard]] Scenario generate(const GeneratorConfig& cfg);

}  // namespace bevrisk
