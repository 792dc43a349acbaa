#include "bevrisk/scene.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bevrisk {

std::optional<SemanticLabel> label_from_code(int code) {
  if (code < 0 || code >= kLabelCount) return std::nullopt;
  return static_cast<SemanticLabel>(code);
}

std::string_view label_name(SemanticLabel l) {
  switch (l) {
    case SemanticLabel::Free: return "Free";
    case SemanticLabel::RoadLine: return "RoadLine";
    case SemanticLabel::Vehicle: return "Vehicle";
    case SemanticLabel::Pedestrian: return "Pedestrian";
    case SemanticLabel::OtherStatic: return "OtherStatic";
  }
  return "?";
}

SemanticGrid::SemanticGrid(GridSpec spec)
    : spec_(spec),
      labels_(spec.size(), SemanticLabel::Free),
      instances_(spec.size(), kNoInstance) {}

std::optional<InstanceId> SemanticGrid::instance(Cell c) const {
  const InstanceId id = instances_[spec_.index(c)];
  if (id == kNoInstance) return std::nullopt;
  return id;
}

void SemanticGrid::set(Cell c, SemanticLabel label, InstanceId id) {
  const std::size_t i = spec_.index(c);
  labels_[i] = label;
  instances_[i] = id;
}

std::vector<InstanceId> SemanticGrid::instance_ids() const {
  std::vector<InstanceId> ids;
  for (InstanceId id : instances_) {
    if (id != kNoInstance) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool SemanticGrid::has_instance(InstanceId id) const {
  return id != kNoInstance && std::find(instances_.begin(), instances_.end(), id) != instances_.end();
}

std::vector<Cell> SemanticGrid::cells_of(InstanceId id) const {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    if (instances_[i] == id) cells.push_back(spec_.cell_at(i));
  }
  return cells;
}

const Tracklet* Scenario::find_tracklet(InstanceId id) const {
  auto it = std::lower_bound(tracklets.begin(), tracklets.end(), id,
                             [](const Tracklet& t, InstanceId v) { return t.id < v; });
  if (it == tracklets.end() || it->id != id) return nullptr;
  return &*it;
}

bool Scenario::is_risk(int frame, InstanceId id) const {
  auto it = gt_risk.find(frame);
  return it != gt_risk.end() && it->second.contains(id);
}

std::vector<Tracklet> collect_tracklets(std::span<const Frame> frames) {
  std::map<InstanceId, Tracklet> by_id;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const SemanticGrid& g = frames[f].grid;
    const auto ids = g.instances();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == kNoInstance) continue;
      auto [it, inserted] = by_id.try_emplace(ids[i]);
      if (inserted) {
        it->second.id = ids[i];
        it->second.cls = g.labels()[i];
      }
      it->second.cells_by_frame[static_cast<int>(f)].push_back(g.spec().cell_at(i));
    }
  }
  std::vector<Tracklet> out;
  out.reserve(by_id.size());
  for (auto& [id, t] : by_id) out.push_back(std::move(t));
  return out;
}

namespace {

std::string cell_str(Cell c) {
  std::ostringstream os;
  os << "(" << c.row << "," << c.col << ")";
  return os.str();
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> v;
  if (!s.spec.valid()) {
    v.push_back("grid spec must have rows >= 1, cols >= 1, cell_size > 0");
    return v;
  }
  if (!(s.fps > 0.0) || !std::isfinite(s.fps)) v.push_back("fps must be positive");

  // Expected tracklet footprint per frame, rebuilt independently of s.tracklets.
  const auto rebuilt = collect_tracklets(s.frames);

  for (std::size_t f = 0; f < s.frames.size(); ++f) {
    const Frame& fr = s.frames[f];
    const std::string where = "frame " + std::to_string(f);
    if (!(fr.grid.spec() == s.spec)) {
      v.push_back(where + ": grid spec differs from scenario spec");
      continue;
    }
    const auto labels = fr.grid.labels();
    const auto ids = fr.grid.instances();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const Cell c = s.spec.cell_at(i);
      const bool dyn = is_dynamic(labels[i]);
      if (dyn && ids[i] == kNoInstance) {
        v.push_back(where + ": cell " + cell_str(c) + " labeled " + std::string(label_name(labels[i])) +
                    " has no instance ID");
      } else if (!dyn && ids[i] != kNoInstance) {
        v.push_back(where + ": cell " + cell_str(c) + " labeled " + std::string(label_name(labels[i])) +
                    " carries instance ID " + std::to_string(ids[i]));
      } else if (ids[i] < kNoInstance) {
        v.push_back(where + ": cell " + cell_str(c) + " has negative instance ID");
      } else if (dyn) {
        const Tracklet* t = s.find_tracklet(ids[i]);
        if (t != nullptr && t->cls != labels[i]) {
          v.push_back(where + ": cell " + cell_str(c) + " instance " + std::to_string(ids[i]) +
                      " labeled " + std::string(label_name(labels[i])) + " but tracklet class is " +
                      std::string(label_name(t->cls)));
        }
      }
    }
    if (!s.spec.contains(fr.ego.cell)) v.push_back(where + ": ego cell " + cell_str(fr.ego.cell) + " out of bounds");
    if (!std::isfinite(fr.target.row) || !std::isfinite(fr.target.col)) v.push_back(where + ": target not finite");

    for (InstanceId id : fr.grid.instance_ids()) {
      const Tracklet* t = s.find_tracklet(id);
      if (t == nullptr) {
        v.push_back(where + ": instance " + std::to_string(id) + " has no tracklet");
        continue;
      }
      auto it = t->cells_by_frame.find(static_cast<int>(f));
      if (it == t->cells_by_frame.end() || it->second != fr.grid.cells_of(id)) {
        v.push_back(where + ": tracklet " + std::to_string(id) + " cells disagree with grid");
      }
    }

    if (auto g = s.gt_risk.find(static_cast<int>(f)); g != s.gt_risk.end()) {
      for (InstanceId id : g->second) {
        if (s.find_tracklet(id) == nullptr) {
          v.push_back(where + ": gt_risk names instance " + std::to_string(id) + " but no such tracklet exists");
        } else if (!fr.grid.has_instance(id)) {
          v.push_back(where + ": gt_risk instance " + std::to_string(id) + " is not present at this frame");
        }
      }
    }
  }

  for (const Tracklet& t : s.tracklets) {
    if (!is_dynamic(t.cls)) v.push_back("tracklet " + std::to_string(t.id) + " has non-dynamic class");
    for (const auto& [f, cells] : t.cells_by_frame) {
      if (f < 0 || static_cast<std::size_t>(f) >= s.frames.size() ||
          !s.frames[static_cast<std::size_t>(f)].grid.has_instance(t.id)) {
        v.push_back("tracklet " + std::to_string(t.id) + " lists frame " + std::to_string(f) +
                    " where the instance is absent");
      }
    }
  }
  if (s.tracklets.size() != rebuilt.size()) v.push_back("tracklet list does not match grid instances");

  for (const auto& [f, ids] : s.gt_risk) {
    if (f < 0 || static_cast<std::size_t>(f) >= s.frames.size()) {
      v.push_back("gt_risk references frame " + std::to_string(f) + " outside the scenario");
    }
  }
  if (s.critical_frame &&
      (*s.critical_frame < 0 || static_cast<std::size_t>(*s.critical_frame) >= s.frames.size())) {
    v.push_back("critical_frame " + std::to_string(*s.critical_frame) + " is not a valid frame index");
  }
  return v;
}

}  // namespace bevrisk
