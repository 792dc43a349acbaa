#include "bevrisk/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bevrisk {

std::string_view kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::BlockingPedestrian: return "blocking-pedestrian";
    case ScenarioKind::BlockingVehicle: return "blocking-vehicle";
    case ScenarioKind::OppositeLane: return "opposite-lane";
    case ScenarioKind::InteractionFree: return "interaction-free";
    case ScenarioKind::Jaywalker: return "jaywalker";
    case ScenarioKind::BoxedIn: return "boxed-in";
  }
  return "?";
}

std::optional<ScenarioKind> parse_kind(std::string_view s) {
  static constexpr std::array<std::string_view, 6> camel{"BlockingPedestrian", "BlockingVehicle", "OppositeLane",
                                                         "InteractionFree",    "Jaywalker",       "BoxedIn"};
  for (std::size_t i = 0; i < kAllScenarioKinds.size(); ++i) {
    if (s == kind_name(kAllScenarioKinds[i]) || s == camel[i]) return kAllScenarioKinds[i];
  }
  return std::nullopt;
}

namespace {

constexpr int kVehicleLength = 9;  // 4.5 m
constexpr int kVehicleWidth = 4;   // 2 m
constexpr int kPedestrianSize = 2;
constexpr double kTargetHorizonS = 3.0;
constexpr int kApproachMargin = 2;  // cells beyond the ego lane that still count as approaching

struct Road {
  int ego_col;      // ego lane center
  int right_line;   // ego lane, outer edge
  int center_line;  // between the lanes
  int far_line;     // opposite lane, outer edge
  int opposite_center;
};

/// Rectangle moving at constant velocity in the ego frame (cells, cells/frame).
struct Agent {
  InstanceId id;
  SemanticLabel cls;
  double row0, col0;
  double row_rate, col_rate;
  int length, width;
  bool risky_when_near_lane;  // gt_risk while it occupies or approaches the ego lane
  bool always_risky;          // gt_risk at every frame it is visible
};

struct Footprint {
  int row_min, col_min, row_max, col_max;  // inclusive
};

Footprint footprint_at(const Agent& a, int frame) {
  const int r = static_cast<int>(std::lround(a.row0 + a.row_rate * frame));
  const int c = static_cast<int>(std::lround(a.col0 + a.col_rate * frame));
  return {r, c, r + a.length - 1, c + a.width - 1};
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [-1, 1].
  double sym() { return std::uniform_real_distribution<double>(-1.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

 private:
  std::mt19937_64 engine_;
};

Road layout(const GeneratorConfig& cfg) {
  const int half = cfg.lane_width / 2;
  if (half < 2) throw std::invalid_argument("infeasible geometry: lane_width must be >= 4 cells");
  Road road{};
  road.ego_col = cfg.spec.cols / 2;
  road.right_line = road.ego_col + half;
  road.center_line = road.ego_col - half;
  road.far_line = road.ego_col - 3 * half;
  road.opposite_center = road.ego_col - 2 * half;
  // Shoulder agents sit up to 12 cells beyond the outer lines.
  if (road.far_line - 12 < 0 || road.right_line + 12 >= cfg.spec.cols) {
    throw std::invalid_argument("infeasible geometry: road does not fit the grid laterally");
  }
  if (cfg.spec.rows < 30) throw std::invalid_argument("infeasible geometry: grid needs at least 30 rows");
  return road;
}

std::vector<Agent> script_agents(const GeneratorConfig& cfg, const Road& road, double ego_rate, Rng& rng) {
  const double j = std::max(cfg.jitter, 0.0);
  const double cells_per_frame_per_mps = 1.0 / (cfg.fps * cfg.spec.cell_size);
  const int opp_left = road.opposite_center - kVehicleWidth / 2;
  std::vector<Agent> agents;

  // Oncoming vehicle kept inside the opposite lane; jitter only moves it
  // away from the center line.
  auto oncoming = [&](InstanceId id, double row0) {
    const int lo = road.far_line + 1;
    const int hi = road.center_line - kVehicleWidth;
    const int col = std::clamp(opp_left - static_cast<int>(std::lround(j * std::abs(rng.sym()))), lo, hi);
    const double speed = rng.uniform(5.0, 8.0) * cells_per_frame_per_mps;
    return Agent{id, SemanticLabel::Vehicle, row0, static_cast<double>(col), -speed - ego_rate, 0.0,
                 kVehicleLength, kVehicleWidth, false, false};
  };

  switch (cfg.kind) {
    case ScenarioKind::BlockingPedestrian: {
      const double walk = rng.uniform(1.2, 1.5) * cells_per_frame_per_mps;
      agents.push_back({1, SemanticLabel::Pedestrian, 12.0 + j * rng.sym(),
                        road.right_line + 1 + 0.5 * j * std::abs(rng.sym()), -ego_rate, -walk, kPedestrianSize,
                        kPedestrianSize, true, false});
      agents.push_back(oncoming(2, 40.0 + 5.0 * j * rng.sym()));
      break;
    }
    case ScenarioKind::BlockingVehicle: {
      const double lead_speed = rng.uniform(0.0, 0.5) * cells_per_frame_per_mps;
      agents.push_back({1, SemanticLabel::Vehicle, 14.0 + j * rng.sym(),
                        static_cast<double>(road.ego_col - kVehicleWidth / 2), lead_speed - ego_rate, 0.0,
                        kVehicleLength, kVehicleWidth, false, true});
      agents.push_back({2, SemanticLabel::Vehicle, 30.0 + 2.0 * j * rng.sym(),
                        static_cast<double>(road.right_line + 4), -ego_rate, 0.0, kVehicleLength, kVehicleWidth,
                        false, false});
      break;
    }
    case ScenarioKind::OppositeLane: {
      agents.push_back(oncoming(1, 50.0 + 10.0 * j * rng.sym()));
      break;
    }
    case ScenarioKind::InteractionFree: {
      agents.push_back({1, SemanticLabel::Vehicle, 20.0 + 2.0 * j * rng.sym(),
                        static_cast<double>(road.far_line - 3 - kVehicleWidth), -ego_rate, 0.0, kVehicleLength,
                        kVehicleWidth, false, false});
      const double stroll = rng.uniform(1.0, 1.5) * cells_per_frame_per_mps;
      agents.push_back({2, SemanticLabel::Pedestrian, 10.0 + 2.0 * j * rng.sym(),
                        static_cast<double>(road.right_line + 8), stroll - ego_rate, 0.0, kPedestrianSize,
                        kPedestrianSize, false, false});
      break;
    }
    case ScenarioKind::Jaywalker: {
      const double walk = rng.uniform(1.5, 1.8) * cells_per_frame_per_mps;
      agents.push_back({1, SemanticLabel::Pedestrian, 12.0 + j * rng.sym(),
                        road.center_line - 3 - 0.5 * j * std::abs(rng.sym()), -ego_rate, walk, kPedestrianSize,
                        kPedestrianSize, true, false});
      agents.push_back(oncoming(2, 45.0 + 5.0 * j * rng.sym()));
      break;
    }
    case ScenarioKind::BoxedIn: {
      // Lead and side vehicles keep pace with the ego.
      agents.push_back({1, SemanticLabel::Vehicle, 3.0 + 0.5 * j * std::abs(rng.sym()),
                        static_cast<double>(road.ego_col - kVehicleWidth / 2), 0.0, 0.0, kVehicleLength,
                        kVehicleWidth, false, true});
      agents.push_back({2, SemanticLabel::Vehicle, -3.0 + j * rng.sym(), static_cast<double>(opp_left), 0.0, 0.0,
                        kVehicleLength, kVehicleWidth, false, false});
      break;
    }
  }
  return agents;
}

}  // namespace

Scenario generate(const GeneratorConfig& cfg) {
  if (!cfg.spec.valid()) throw std::invalid_argument("invalid grid spec");
  if (!(cfg.fps > 0.0)) throw std::invalid_argument("fps must be positive");
  if (cfg.window < 1 || cfg.frame_count < cfg.window) {
    throw std::invalid_argument("frame_count must be at least the predictor window");
  }
  if (!(cfg.ego_speed >= 0.0)) throw std::invalid_argument("ego_speed must be >= 0");
  const Road road = layout(cfg);

  Rng rng(cfg.seed);
  const double ego_rate = cfg.ego_speed / (cfg.fps * cfg.spec.cell_size);
  const std::vector<Agent> agents = script_agents(cfg, road, ego_rate, rng);

  Scenario s;
  s.id = std::string(kind_name(cfg.kind)) + "-s" + std::to_string(cfg.seed);
  s.spec = cfg.spec;
  s.fps = cfg.fps;

  const Cell ego_cell{0, road.ego_col};
  const TargetPoint target{ego_rate * kTargetHorizonS * cfg.fps, static_cast<double>(road.ego_col)};

  std::optional<double> closest;
  for (int f = 0; f < cfg.frame_count; ++f) {
    SemanticGrid grid(cfg.spec);
    for (int r = 0; r < cfg.spec.rows; ++r) {
      for (int line : {road.far_line, road.center_line, road.right_line}) grid.set({r, line}, SemanticLabel::RoadLine);
    }
    std::set<InstanceId> risky;
    for (const Agent& a : agents) {
      const Footprint fp = footprint_at(a, f);
      bool visible = false;
      double row_sum = 0.0, col_sum = 0.0;
      int n = 0;
      for (int r = fp.row_min; r <= fp.row_max; ++r) {
        for (int c = fp.col_min; c <= fp.col_max; ++c) {
          if (!cfg.spec.contains({r, c})) continue;
          grid.set({r, c}, a.cls, a.id);
          visible = true;
          row_sum += r;
          col_sum += c;
          ++n;
        }
      }
      if (!visible) continue;
      const bool near_lane = fp.col_min <= road.right_line + kApproachMargin &&
                             fp.col_max >= road.center_line - kApproachMargin;
      if (a.always_risky || (a.risky_when_near_lane && near_lane)) {
        risky.insert(a.id);
        const double dr = row_sum / n - ego_cell.row;
        const double dc = col_sum / n - ego_cell.col;
        const double d = std::sqrt(dr * dr + dc * dc);
        if (!closest || d < *closest) {
          closest = d;
          s.critical_frame = f;
        }
      }
    }
    if (!risky.empty()) s.gt_risk.emplace(f, std::move(risky));
    s.frames.push_back(Frame{std::move(grid), EgoState{ego_cell, cfg.ego_speed}, target});
  }
  s.tracklets = collect_tracklets(s.frames);
  return s;
}

}  // namespace bevrisk
