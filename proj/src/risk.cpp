#include "bevrisk/risk.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "bevrisk/parallel.hpp"

namespace bevrisk {

double rule_predict(std::span<const PotentialField* const> window, const EgoState& ego, const TargetPoint& target,
                    const RulePredictorConfig& cfg) {
  if (window.empty()) throw std::invalid_argument("predictor window is empty");
  for (const PotentialField* f : window) {
    if (!(f->spec == window.front()->spec)) throw std::invalid_argument("predictor window mixes grid specs");
  }
  const PotentialField& latest = *window.back();
  const Path path = plan(latest, ego, target, cfg.planner);
  if (path.terminal != Terminal::ReachedTarget) return 1.0;

  const std::size_t n = std::min(path.waypoints.size(), static_cast<std::size_t>(std::max(cfg.lookahead, 0)));
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, latest.repulsive_at(path.waypoints[i]));
  return std::clamp(peak / cfg.saturation, 0.0, 1.0);
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Bcp: return "bcp";
    case Method::Oade: return "oade";
    case Method::Ofde: return "ofde";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view s) {
  if (s == "bcp") return Method::Bcp;
  if (s == "oade") return Method::Oade;
  if (s == "ofde") return Method::Ofde;
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

const Frame& frame_at(const Scenario& s, int frame) {
  if (frame < 0 || static_cast<std::size_t>(frame) >= s.frames.size()) {
    throw std::out_of_range("frame " + std::to_string(frame) + " outside scenario");
  }
  return s.frames[static_cast<std::size_t>(frame)];
}

template <class Distance>
FrameScores score_displacement(const Scenario& s, int frame, const ScoringOptions& opts, Distance distance) {
  const auto start = Clock::now();
  const Frame& fr = frame_at(s, frame);
  const PotentialField original = render_field(fr.grid, fr.target, opts.constants);
  const Path base = plan(original, fr.ego, fr.target, opts.planner);

  const std::vector<InstanceId> candidates = fr.grid.instance_ids();
  std::vector<double> scores(candidates.size());
  parallel_for(candidates.size(), opts.workers, [&](std::size_t i) {
    const PotentialField cf =
        render_field_reusing(remove_instance(fr.grid, candidates[i]), original.attractive, opts.constants);
    scores[i] = distance(base, plan(cf, fr.ego, fr.target, opts.planner));
  });

  FrameScores out;
  out.frame = frame;
  out.scored = true;
  for (std::size_t i = 0; i < candidates.size(); ++i) out.scores.emplace(candidates[i], scores[i]);
  out.latency_ms = elapsed_ms(start);
  return out;
}

}  // namespace

FrameScores score_bcp(const Scenario& s, int frame, const BehaviorPredictor& predictor, const ScoringOptions& opts) {
  const auto start = Clock::now();
  const Frame& current = frame_at(s, frame);
  const int first = std::max(0, frame - std::max(predictor.window_size(), 1) + 1);
  const auto span_len = static_cast<std::size_t>(frame - first + 1);

  std::vector<PotentialField> original;
  original.reserve(span_len);
  for (int f = first; f <= frame; ++f) {
    const Frame& fr = s.frames[static_cast<std::size_t>(f)];
    original.push_back(render_field(fr.grid, fr.target, opts.constants));
  }
  std::vector<const PotentialField*> original_window;
  for (const PotentialField& f : original) original_window.push_back(&f);
  const double s_orig = predictor.predict(original_window, current.ego, current.target);

  const std::vector<InstanceId> candidates = current.grid.instance_ids();
  std::vector<double> scores(candidates.size());
  parallel_for(candidates.size(), opts.workers, [&](std::size_t i) {
    const InstanceId id = candidates[i];
    std::vector<PotentialField> removed;
    removed.reserve(span_len);
    std::vector<const PotentialField*> window;
    for (std::size_t w = 0; w < span_len; ++w) {
      const SemanticGrid& g = s.frames[static_cast<std::size_t>(first) + w].grid;
      if (g.has_instance(id)) {
        removed.push_back(render_field_reusing(remove_instance(g, id), original[w].attractive, opts.constants));
        window.push_back(&removed.back());
      } else {
        window.push_back(&original[w]);
      }
    }
    scores[i] = s_orig - predictor.predict(window, current.ego, current.target);
  });

  FrameScores out;
  out.frame = frame;
  out.scored = true;
  out.s_orig = s_orig;
  for (std::size_t i = 0; i < candidates.size(); ++i) out.scores.emplace(candidates[i], scores[i]);
  out.latency_ms = elapsed_ms(start);
  return out;
}

FrameScores score_oade(const Scenario& s, int frame, const ScoringOptions& opts) {
  return score_displacement(s, frame, opts, [](const Path& a, const Path& b) { return ade(a, b); });
}

FrameScores score_ofde(const Scenario& s, int frame, const ScoringOptions& opts) {
  return score_displacement(s, frame, opts, [](const Path& a, const Path& b) { return fde(a, b); });
}

RiskReport run_pipeline(const Scenario& s, Method method, const BehaviorPredictor& predictor,
                        const ScoringOptions& opts) {
  opts.constants.validate();
  RiskReport report;
  report.scenario_id = s.id;
  report.method = method;
  const int first_scored = std::max(predictor.window_size(), 1) - 1;
  for (int f = 0; f < static_cast<int>(s.frames.size()); ++f) {
    if (f < first_scored) {
      FrameScores unscored;
      unscored.frame = f;
      report.frames.push_back(std::move(unscored));
      continue;
    }
    switch (method) {
      case Method::Bcp: report.frames.push_back(score_bcp(s, f, predictor, opts)); break;
      case Method::Oade: report.frames.push_back(score_oade(s, f, opts)); break;
      case Method::Ofde: report.frames.push_back(score_ofde(s, f, opts)); break;
    }
  }
  return report;
}

}  // namespace bevrisk
