#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bevrisk/risk.hpp"
#include "bevrisk/scene.hpp"

namespace bevrisk {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MetricConfig {
  int pic_T = 60;  // frames (3 s at 20 fps)
  double pic_eps = 0.01;
  /// (w_p, w_n); when absent the weights balance the class totals.
  std::optional<std::pair<double, double>> wmota_weights;
  double fps = 20.0;
  std::vector<double> ot_f1_horizons{1.0, 2.0, 3.0};  // seconds

  void validate() const;
};

struct Sample {
  double score = 0.0;
  bool positive = false;
};

struct SweepResult {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// No ground-truth positives: F1 is 0 everywhere and the sentinel is returned.
  bool degenerate = false;
};

/// F1 from counts; 0 whenever tp == 0.
[[nodiscard]] double f1_score(std::size_t tp, std::size_t fp, std::size_t fn);
/// Per-frame F1; a frame with nothing to find and nothing predicted scores 1.
[[nodiscard]] double frame_f1(std::size_t tp, std::size_t fp, std::size_t fn);

/// Sweeps thresholds over every distinct score plus +inf; a sample is predicted
/// risky iff score >= threshold. Returns the smallest threshold reaching the
/// maximum pooled F1. Throws MetricError on an empty sample set.
[[nodiscard]] SweepResult sweep_optimal_f1(std::span<const Sample> samples);

/// -sum_t exp(-(T - t) / T) * ln(max(F1_t, eps)). The list holds the last
/// frames before the critical point; its final entry is t = T.
[[nodiscard]] double pic(std::span<const double> f1_per_frame, const MetricConfig& cfg);
/// PIC with every frame at the eps floor.
[[nodiscard]] double pic_worst_case(std::size_t frames, const MetricConfig& cfg);

struct PicTerm {
  double raw = 0.0;
  std::size_t frames = 0;
};
/// Total raw PIC over the total worst-case PIC of the same scenarios.
[[nodiscard]] double pic_normalized(std::span<const PicTerm> terms, const MetricConfig& cfg);

struct Decision {
  std::size_t scenario = 0;
  int frame = 0;
  InstanceId instance = kNoInstance;
  bool predicted = false;
  bool positive = false;
};

/// 1 - sum_t(w_p (FN + IDsw^p) + w_n (FP + IDsw^n)) / sum_t(w_p GT^p + w_n GT^n).
/// An identity switch is a prediction flip of an instance present at t-1 and t.
[[nodiscard]] double wmota(std::span<const Decision> decisions, const MetricConfig& cfg);

struct ScoredSample {
  std::size_t scenario = 0;
  int frame = 0;
  InstanceId instance = kNoInstance;
  double score = 0.0;
  bool positive = false;
};

/// Joins reports to scenarios by id. Throws MetricError naming the id on any
/// report without a scenario, scenario without a report, or unknown instance.
[[nodiscard]] std::vector<ScoredSample> collect_samples(std::span<const RiskReport> reports,
                                                        std::span<const Scenario> scenarios);

/// Optimal F1 restricted to frames in [critical - horizon * fps, critical].
/// Scenarios without a critical frame are skipped; throws MetricError when no
/// sample qualifies.
[[nodiscard]] SweepResult ot_f1_t(std::span<const ScoredSample> samples, std::span<const Scenario> scenarios,
                                  double horizon_s, const MetricConfig& cfg);

struct MetricSummary {
  double ot_precision = 0.0;
  double ot_recall = 0.0;
  double ot_f1 = 0.0;
  double optimal_threshold = 0.0;
  bool degenerate = false;
  /// (horizon seconds, OT-F1-T); empty optional when no scenario qualifies.
  std::vector<std::pair<double, std::optional<double>>> ot_f1_t;
  double pic_raw = 0.0;
  double pic_normalized = 0.0;
  double wmota = 0.0;
  double mean_latency_s = 0.0;
  std::size_t samples = 0;
};

/// Pools all scenarios. The global optimal threshold drives the per-frame F1
/// used by PIC and the decisions used by wMOTA.
[[nodiscard]] MetricSummary evaluate(std::span<const RiskReport> reports, std::span<const Scenario> scenarios,
                                     const MetricConfig& cfg = {});

}  // namespace bevrisk
