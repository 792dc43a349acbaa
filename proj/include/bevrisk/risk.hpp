#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bevrisk/field.hpp"
#include "bevrisk/planner.hpp"
#include "bevrisk/scene.hpp"

namespace bevrisk {

inline constexpr int kDefaultWindow = 5;

/// Maps the most recent potential fields (oldest first) plus the ego state and
/// target point to a stop score in [0, 1]; higher means the ego is influenced.
/// Implementations must be deterministic and safe to call concurrently.
class BehaviorPredictor {
 public:
  virtual ~BehaviorPredictor() = default;

  [[nodiscard]] virtual double predict(std::span<const PotentialField* const> window, const EgoState& ego,
                                       const TargetPoint& target) const = 0;
  [[nodiscard]] virtual int window_size() const { return kDefaultWindow; }
};

struct RulePredictorConfig {
  double saturation = 1000.0;
  int lookahead = 40;  // waypoints
  int window = kDefaultWindow;
  PlannerConfig planner;
};

/// Plans over the latest field. Returns 1 unless the plan reaches the target;
/// otherwise the peak repulsive energy along the first `lookahead` waypoints
/// divided by `saturation`, clamped to [0, 1].
[[nodiscard]] double rule_predict(std::span<const PotentialField* const> window, const EgoState& ego,
                                  const TargetPoint& target, const RulePredictorConfig& cfg = {});

class RuleBasedPredictor final : public BehaviorPredictor {
 public:
  explicit RuleBasedPredictor(RulePredictorConfig cfg = {}) : cfg_(cfg) {}

  [[nodiscard]] double predict(std::span<const PotentialField* const> window, const EgoState& ego,
                               const TargetPoint& target) const override {
    return rule_predict(window, ego, target, cfg_);
  }
  [[nodiscard]] int window_size() const override { return cfg_.window; }
  [[nodiscard]] const RulePredictorConfig& config() const { return cfg_; }

 private:
  RulePredictorConfig cfg_;
};

enum class Method { Bcp, Oade, Ofde };

[[nodiscard]] std::string_view method_name(Method m);
[[nodiscard]] std::optional<Method> parse_method(std::string_view s);

struct FrameScores {
  int frame = 0;
  bool scored = false;
  /// Predictor output on the unmodified window; absent for the planner baselines.
  std::optional<double> s_orig;
  std::map<InstanceId, double> scores;
  double latency_ms = 0.0;

  bool operator==(const FrameScores&) const = default;
};

struct RiskReport {
  std::string scenario_id;
  Method method = Method::Bcp;
  std::vector<FrameScores> frames;

  bool operator==(const RiskReport&) const = default;
};

struct ScoringOptions {
  FieldConstants constants;
  PlannerConfig planner;
  int workers = 1;
};

/// Response delta s_orig - s_cf(i) for every instance present at `frame`. The
/// counterfactual removes the tracklet from every frame of the window.
[[nodiscard]] FrameScores score_bcp(const Scenario& s, int frame, const BehaviorPredictor& predictor,
                                    const ScoringOptions& opts);
/// ADE between plans on the original and counterfactual fields of `frame`.
[[nodiscard]] FrameScores score_oade(const Scenario& s, int frame, const ScoringOptions& opts);
/// FDE between plans on the original and counterfactual fields of `frame`.
[[nodiscard]] FrameScores score_ofde(const Scenario& s, int frame, const ScoringOptions& opts);

/// Scores every frame whose full predictor window is available; earlier frames
/// appear unscored with empty maps.
[[nodiscard]] RiskReport run_pipeline(const Scenario& s, Method method, const BehaviorPredictor& predictor,
                                      const ScoringOptions& opts);

}  // namespace bevrisk
