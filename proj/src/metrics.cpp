#include "bevrisk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_map>

namespace bevrisk {

void MetricConfig::validate() const {
  if (pic_T < 1) throw MetricError("pic_T must be >= 1");
  if (!(pic_eps > 0.0 && pic_eps < 1.0)) throw MetricError("pic_eps must lie in (0, 1)");
  if (wmota_weights && !(wmota_weights->first > 0.0 && wmota_weights->second > 0.0)) {
    throw MetricError("wMOTA weights must be positive");
  }
  if (!(fps > 0.0)) throw MetricError("fps must be positive");
}

double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double frame_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp + fp + fn == 0) return 1.0;
  return f1_score(tp, fp, fn);
}

SweepResult sweep_optimal_f1(std::span<const Sample> samples) {
  if (samples.empty()) throw MetricError("threshold sweep needs at least one sample");
  std::vector<Sample> sorted(samples.begin(), samples.end());
  for (const Sample& s : sorted) {
    if (std::isnan(s.score)) throw MetricError("threshold sweep got a NaN score");
  }
  std::sort(sorted.begin(), sorted.end(), [](const Sample& a, const Sample& b) { return a.score < b.score; });

  const std::size_t n = sorted.size();
  // positives_from[i] = GT positives among sorted[i..n).
  std::vector<std::size_t> positives_from(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) positives_from[i] = positives_from[i + 1] + (sorted[i].positive ? 1 : 0);
  const std::size_t total_pos = positives_from[0];

  constexpr double kSentinel = std::numeric_limits<double>::infinity();
  if (total_pos == 0) return SweepResult{kSentinel, 0.0, 0.0, 0.0, true};

  SweepResult best{kSentinel, 0.0, 0.0, -1.0, false};
  auto consider = [&](double threshold, std::size_t predicted, std::size_t tp) {
    const std::size_t fp = predicted - tp;
    const std::size_t fn = total_pos - tp;
    const double f1 = f1_score(tp, fp, fn);
    if (f1 > best.f1) {
      best.threshold = threshold;
      best.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
      best.recall = static_cast<double>(tp) / static_cast<double>(total_pos);
      best.f1 = f1;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && sorted[i].score == sorted[i - 1].score) continue;
    consider(sorted[i].score, n - i, positives_from[i]);
  }
  consider(kSentinel, 0, 0);
  return best;
}

double pic(std::span<const double> f1_per_frame, const MetricConfig& cfg) {
  const auto T = static_cast<double>(cfg.pic_T);
  const std::size_t len = f1_per_frame.size();
  double total = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    // Entry j sits at t = T - len + 1 + j, so T - t = len - 1 - j.
    const double weight = std::exp(-static_cast<double>(len - 1 - j) / T);
    const double f1 = std::clamp(f1_per_frame[j], cfg.pic_eps, 1.0);
    total -= weight * std::log(f1);
  }
  return total;
}

double pic_worst_case(std::size_t frames, const MetricConfig& cfg) {
  const std::vector<double> floor(frames, 0.0);
  return pic(floor, cfg);
}

double pic_normalized(std::span<const PicTerm> terms, const MetricConfig& cfg) {
  double raw = 0.0;
  double worst = 0.0;
  for (const PicTerm& t : terms) {
    raw += t.raw;
    worst += pic_worst_case(t.frames, cfg);
  }
  if (worst <= 0.0) return 0.0;
  return std::clamp(raw / worst, 0.0, 1.0);
}

double wmota(std::span<const Decision> decisions, const MetricConfig& cfg) {
  std::size_t gt_pos = 0, gt_neg = 0;
  std::size_t fn = 0, fp = 0, sw_pos = 0, sw_neg = 0;

  struct Key {
    std::size_t scenario;
    int frame;
    InstanceId instance;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, bool> predicted;
  for (const Decision& d : decisions) predicted[{d.scenario, d.frame, d.instance}] = d.predicted;

  for (const Decision& d : decisions) {
    if (d.positive) {
      ++gt_pos;
      if (!d.predicted) ++fn;
    } else {
      ++gt_neg;
      if (d.predicted) ++fp;
    }
    auto prev = predicted.find({d.scenario, d.frame - 1, d.instance});
    if (prev != predicted.end() && prev->second != d.predicted) {
      if (d.positive) {
        ++sw_pos;
      } else {
        ++sw_neg;
      }
    }
  }

  double wp = 0.5, wn = 0.5;
  if (cfg.wmota_weights) {
    wp = cfg.wmota_weights->first;
    wn = cfg.wmota_weights->second;
  } else if (gt_pos > 0 && gt_neg > 0) {
    wp = static_cast<double>(gt_neg) / static_cast<double>(gt_pos + gt_neg);
    wn = 1.0 - wp;
  }
  const double denom = wp * static_cast<double>(gt_pos) + wn * static_cast<double>(gt_neg);
  if (!(denom > 0.0)) throw MetricError("wMOTA needs at least one ground-truth sample");
  const double misses = wp * static_cast<double>(fn + sw_pos) + wn * static_cast<double>(fp + sw_neg);
  return 1.0 - misses / denom;
}

namespace {

std::unordered_map<std::string, std::size_t> index_scenarios(std::span<const Scenario> scenarios) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (!by_id.emplace(scenarios[i].id, i).second) {
      throw MetricError("duplicate scenario id '" + scenarios[i].id + "'");
    }
  }
  return by_id;
}

}  // namespace

std::vector<ScoredSample> collect_samples(std::span<const RiskReport> reports, std::span<const Scenario> scenarios) {
  const auto by_id = index_scenarios(scenarios);
  std::vector<bool> covered(scenarios.size(), false);
  std::vector<ScoredSample> out;
  for (const RiskReport& r : reports) {
    auto it = by_id.find(r.scenario_id);
    if (it == by_id.end()) throw MetricError("report references unknown scenario '" + r.scenario_id + "'");
    const Scenario& s = scenarios[it->second];
    covered[it->second] = true;
    for (const FrameScores& f : r.frames) {
      if (!f.scored) continue;
      if (f.frame < 0 || static_cast<std::size_t>(f.frame) >= s.frames.size()) {
        throw MetricError("report for '" + r.scenario_id + "' has frame " + std::to_string(f.frame) +
                          " outside the scenario");
      }
      const SemanticGrid& g = s.frames[static_cast<std::size_t>(f.frame)].grid;
      for (const auto& [id, score] : f.scores) {
        if (!g.has_instance(id)) {
          throw MetricError("report for '" + r.scenario_id + "' scores instance " + std::to_string(id) +
                            " absent at frame " + std::to_string(f.frame));
        }
        out.push_back({it->second, f.frame, id, score, s.is_risk(f.frame, id)});
      }
    }
  }
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (!covered[i]) throw MetricError("no report for scenario '" + scenarios[i].id + "'");
  }
  return out;
}

SweepResult ot_f1_t(std::span<const ScoredSample> samples, std::span<const Scenario> scenarios, double horizon_s,
                    const MetricConfig& cfg) {
  const auto span_frames = static_cast<int>(std::llround(horizon_s * cfg.fps));
  std::vector<Sample> kept;
  for (const ScoredSample& s : samples) {
    const auto& critical = scenarios[s.scenario].critical_frame;
    if (!critical) continue;
    if (s.frame >= *critical - span_frames && s.frame <= *critical) kept.push_back({s.score, s.positive});
  }
  if (kept.empty()) throw MetricError("no samples fall within the critical-frame horizon");
  return sweep_optimal_f1(kept);
}

MetricSummary evaluate(std::span<const RiskReport> reports, std::span<const Scenario> scenarios,
                       const MetricConfig& cfg) {
  cfg.validate();
  if (reports.empty()) throw MetricError("no reports to evaluate");
  for (const RiskReport& r : reports) {
    if (r.method != reports.front().method) throw MetricError("reports mix scoring methods");
  }
  const std::vector<ScoredSample> samples = collect_samples(reports, scenarios);
  if (samples.empty()) throw MetricError("reports contain no scored instances");

  std::vector<Sample> pooled;
  pooled.reserve(samples.size());
  for (const ScoredSample& s : samples) pooled.push_back({s.score, s.positive});
  const SweepResult best = sweep_optimal_f1(pooled);

  MetricSummary out;
  out.ot_precision = best.precision;
  out.ot_recall = best.recall;
  out.ot_f1 = best.f1;
  out.optimal_threshold = best.threshold;
  out.degenerate = best.degenerate;
  out.samples = samples.size();

  for (double h : cfg.ot_f1_horizons) {
    std::optional<double> v;
    try {
      v = ot_f1_t(samples, scenarios, h, cfg).f1;
    } catch (const MetricError&) {
      // no critical frames in this set
    }
    out.ot_f1_t.emplace_back(h, v);
  }

  std::vector<Decision> decisions;
  decisions.reserve(samples.size());
  for (const ScoredSample& s : samples) {
    decisions.push_back({s.scenario, s.frame, s.instance, s.score >= best.threshold, s.positive});
  }
  out.wmota = wmota(decisions, cfg);

  // Per-frame confusion counts at the global threshold.
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<std::pair<std::size_t, int>, Counts> per_frame;
  for (const Decision& d : decisions) {
    Counts& c = per_frame[{d.scenario, d.frame}];
    if (d.predicted && d.positive) ++c.tp;
    if (d.predicted && !d.positive) ++c.fp;
    if (!d.predicted && d.positive) ++c.fn;
  }

  const auto by_id = index_scenarios(scenarios);
  std::vector<std::set<int>> scored_frames(scenarios.size());
  double latency_total = 0.0;
  std::size_t latency_count = 0;
  for (const RiskReport& r : reports) {
    const std::size_t si = by_id.at(r.scenario_id);
    for (const FrameScores& f : r.frames) {
      if (!f.scored) continue;
      scored_frames[si].insert(f.frame);
      latency_total += f.latency_ms;
      ++latency_count;
    }
  }
  out.mean_latency_s = latency_count == 0 ? 0.0 : latency_total / static_cast<double>(latency_count) / 1000.0;

  std::vector<PicTerm> terms;
  for (std::size_t si = 0; si < scenarios.size(); ++si) {
    std::vector<double> f1s;
    for (int f : scored_frames[si]) {
      if (scenarios[si].critical_frame && f > *scenarios[si].critical_frame) break;
      auto it = per_frame.find({si, f});
      f1s.push_back(it == per_frame.end() ? 1.0 : frame_f1(it->second.tp, it->second.fp, it->second.fn));
    }
    const std::size_t keep = std::min(f1s.size(), static_cast<std::size_t>(cfg.pic_T));
    const std::span<const double> tail(f1s.data() + (f1s.size() - keep), keep);
    const double raw = pic(tail, cfg);
    out.pic_raw += raw;
    terms.push_back({raw, keep});
  }
  out.pic_normalized = pic_normalized(terms, cfg);
  return out;
}

}  // namespace bevrisk
