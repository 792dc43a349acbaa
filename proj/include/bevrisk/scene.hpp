#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bevrisk {

/// Integer lattice coordinate. Row 0 is the ego row; rows grow forward,
/// columns grow laterally.
struct Cell {
  int row = 0;
  int col = 0;

  auto operator<=>(const Cell&) const = default;
};

/// Fixed BEV lattice. The default covers [0m, 50m] ahead of the ego and
/// [-50m, 50m] laterally at 0.5 m per cell.
struct GridSpec {
  int rows = 100;
  int cols = 200;
  double cell_size = 0.5;

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
  [[nodiscard]] bool contains(Cell c) const {
    return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
  }
  [[nodiscard]] std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(c.col);
  }
  [[nodiscard]] Cell cell_at(std::size_t idx) const {
    return {static_cast<int>(idx / static_cast<std::size_t>(cols)),
            static_cast<int>(idx % static_cast<std::size_t>(cols))};
  }
  [[nodiscard]] double longitudinal_extent_m() const { return rows * cell_size; }
  [[nodiscard]] double lateral_extent_m() const { return cols * cell_size; }
  /// Ego anchor: row 0, center column.
  [[nodiscard]] Cell ego_cell() const { return {0, cols / 2}; }
  [[nodiscard]] bool valid() const { return rows >= 1 && cols >= 1 && cell_size > 0.0; }

  bool operator==(const GridSpec&) const = default;
};

enum class SemanticLabel : std::uint8_t {
  Free = 0,
  RoadLine = 1,
  Vehicle = 2,
  Pedestrian = 3,
  OtherStatic = 4,
};

inline constexpr int kLabelCount = 5;

[[nodiscard]] constexpr bool is_dynamic(SemanticLabel l) {
  return l == SemanticLabel::Vehicle || l == SemanticLabel::Pedestrian;
}
[[nodiscard]] std::optional<SemanticLabel> label_from_code(int code);
[[nodiscard]] constexpr int label_code(SemanticLabel l) { return static_cast<int>(l); }
[[nodiscard]] std::string_view label_name(SemanticLabel l);

using InstanceId = std::int32_t;
inline constexpr InstanceId kNoInstance = -1;

/// Per-cell semantic label plus optional instance ID over one GridSpec.
class SemanticGrid {
 public:
  SemanticGrid() : SemanticGrid(GridSpec{}) {}
  explicit SemanticGrid(GridSpec spec);

  [[nodiscard]] const GridSpec& spec() const { return spec_; }
  [[nodiscard]] SemanticLabel label(Cell c) const { return labels_[spec_.index(c)]; }
  [[nodiscard]] std::optional<InstanceId> instance(Cell c) const;

  void set(Cell c, SemanticLabel label, InstanceId id = kNoInstance);

  [[nodiscard]] std::span<const SemanticLabel> labels() const { return labels_; }
  /// Row-major instance IDs, kNoInstance where absent.
  [[nodiscard]] std::span<const InstanceId> instances() const { return instances_; }

  /// Sorted, unique instance IDs present in the grid.
  [[nodiscard]] std::vector<InstanceId> instance_ids() const;
  [[nodiscard]] bool has_instance(InstanceId id) const;
  [[nodiscard]] std::vector<Cell> cells_of(InstanceId id) const;

  bool operator==(const SemanticGrid&) const = default;

 private:
  GridSpec spec_;
  std::vector<SemanticLabel> labels_;
  std::vector<InstanceId> instances_;
};

struct Tracklet {
  InstanceId id = kNoInstance;
  SemanticLabel cls = SemanticLabel::Vehicle;
  std::map<int, std::vector<Cell>> cells_by_frame;

  bool operator==(const Tracklet&) const = default;
};

struct EgoState {
  Cell cell;
  double speed = 0.0;  // m/s

  bool operator==(const EgoState&) const = default;
};

/// Continuous BEV coordinate in cell units; may lie outside the grid.
struct TargetPoint {
  double row = 0.0;
  double col = 0.0;

  bool operator==(const TargetPoint&) const = default;
};

struct Frame {
  SemanticGrid grid;
  EgoState ego;
  TargetPoint target;

  bool operator==(const Frame&) const = default;
};

struct Scenario {
  std::string id;
  GridSpec spec;
  double fps = 20.0;
  std::vector<Frame> frames;
  std::vector<Tracklet> tracklets;
  std::map<int, std::set<InstanceId>> gt_risk;
  std::optional<int> critical_frame;

  [[nodiscard]] const Tracklet* find_tracklet(InstanceId id) const;
  [[nodiscard]] bool is_risk(int frame, InstanceId id) const;

  bool operator==(const Scenario&) const = default;
};

/// Rebuilds tracklets from the per-frame instance arrays, sorted by ID.
/// The class of each tracklet is the label of its first observed cell.
[[nodiscard]] std::vector<Tracklet> collect_tracklets(std::span<const Frame> frames);

/// Every invariant violation found, frame-major then cell-major. Empty means valid.
[[nodiscard]] std::vector<std::string> validate_scenario(const Scenario& s);

}  // namespace bevrisk
