// bevrisk: generate synthetic BEV scenarios, render potential fields, score
// risk objects by counterfactual removal, and evaluate the scores.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bevrisk/field.hpp"
#include "bevrisk/generator.hpp"
#include "bevrisk/image_io.hpp"
#include "bevrisk/metrics.hpp"
#include "bevrisk/planner.hpp"
#include "bevrisk/report_io.hpp"
#include "bevrisk/risk.hpp"
#include "bevrisk/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace bevrisk;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  FieldConstants field;
  PlannerConfig planner;
  RulePredictorConfig predictor;
  MetricConfig metrics;
  int workers = 1;
  std::uint64_t seed = 0;
};

/// Flag values; set only when given on the command line.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> k_roadline, k_dynamic, k_other, k_attractive, d_min;
  std::optional<double> goal_radius;
  std::optional<int> max_steps;
  std::optional<double> saturation;
  std::optional<int> lookahead, window;
  std::optional<int> pic_T;
  std::optional<double> pic_eps;
  std::optional<std::vector<double>> wmota_weights;
};

template <class T>
void opt_flag(CLI::App* app, const std::string& name, std::optional<T>& slot, const std::string& help) {
  app->add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

void add_common_flags(CLI::App* app, Overrides& o) {
  opt_flag(app, "--config", o.config, "Run-config JSON file; flags override its values");
  opt_flag(app, "--seed", o.seed, "Random seed");
  opt_flag(app, "--workers", o.workers, "Worker threads for candidate scoring");
}

void add_field_flags(CLI::App* app, Overrides& o) {
  opt_flag(app, "--k-roadline", o.k_roadline, "Road-line repulsive constant");
  opt_flag(app, "--k-dynamic", o.k_dynamic, "Vehicle/pedestrian repulsive constant");
  opt_flag(app, "--k-other", o.k_other, "Other-object repulsive constant");
  opt_flag(app, "--k-attractive", o.k_attractive, "Attractive constant");
  opt_flag(app, "--d-min", o.d_min, "Distance clamp in cells");
  opt_flag(app, "--goal-radius", o.goal_radius, "Planner arrival radius in cells");
  opt_flag(app, "--max-steps", o.max_steps, "Planner step budget");
}

void add_predictor_flags(CLI::App* app, Overrides& o) {
  opt_flag(app, "--saturation", o.saturation, "Rule predictor saturation energy");
  opt_flag(app, "--lookahead", o.lookahead, "Rule predictor lookahead in waypoints");
  opt_flag(app, "--window", o.window, "Predictor window in frames");
}

void add_metric_flags(CLI::App* app, Overrides& o) {
  opt_flag(app, "--pic-T", o.pic_T, "PIC horizon in frames");
  opt_flag(app, "--pic-eps", o.pic_eps, "PIC F1 floor");
  app->add_option_function<std::vector<double>>(
         "--wmota-weights", [&o](const std::vector<double>& v) { o.wmota_weights = v; }, "wMOTA weights w_p,w_n")
      ->delimiter(',')
      ->expected(2);
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

RunConfig load_config(const Overrides& o) {
  RunConfig cfg;
  if (o.config) {
    std::ifstream in(*o.config);
    if (!in) throw std::runtime_error("cannot open config " + *o.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      if (auto f = j.find("field"); f != j.end()) {
        read_key(*f, "k_roadline", cfg.field.k_roadline);
        read_key(*f, "k_dynamic", cfg.field.k_dynamic);
        read_key(*f, "k_other", cfg.field.k_other);
        read_key(*f, "k_attractive", cfg.field.k_attractive);
        read_key(*f, "d_min", cfg.field.d_min);
      }
      if (auto p = j.find("planner"); p != j.end()) {
        read_key(*p, "goal_radius", cfg.planner.goal_radius);
        read_key(*p, "max_steps", cfg.planner.max_steps);
      }
      if (auto p = j.find("predictor"); p != j.end()) {
        read_key(*p, "saturation", cfg.predictor.saturation);
        read_key(*p, "lookahead", cfg.predictor.lookahead);
        read_key(*p, "window", cfg.predictor.window);
      }
      if (auto m = j.find("metrics"); m != j.end()) {
        read_key(*m, "pic_T", cfg.metrics.pic_T);
        read_key(*m, "pic_eps", cfg.metrics.pic_eps);
        read_key(*m, "fps", cfg.metrics.fps);
        read_key(*m, "ot_f1_horizons", cfg.metrics.ot_f1_horizons);
        if (auto w = m->find("wmota_weights"); w != m->end()) {
          const auto v = w->get<std::vector<double>>();
          if (v.size() != 2) throw std::runtime_error("metrics.wmota_weights needs two values");
          cfg.metrics.wmota_weights = std::make_pair(v[0], v[1]);
        }
      }
      read_key(j, "workers", cfg.workers);
      read_key(j, "seed", cfg.seed);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("config " + *o.config + ": " + e.what());
    }
  }
  auto apply = [](const auto& src, auto& dst) {
    if (src) dst = *src;
  };
  apply(o.seed, cfg.seed);
  apply(o.workers, cfg.workers);
  apply(o.k_roadline, cfg.field.k_roadline);
  apply(o.k_dynamic, cfg.field.k_dynamic);
  apply(o.k_other, cfg.field.k_other);
  apply(o.k_attractive, cfg.field.k_attractive);
  apply(o.d_min, cfg.field.d_min);
  apply(o.goal_radius, cfg.planner.goal_radius);
  apply(o.max_steps, cfg.planner.max_steps);
  apply(o.saturation, cfg.predictor.saturation);
  apply(o.lookahead, cfg.predictor.lookahead);
  apply(o.window, cfg.predictor.window);
  apply(o.pic_T, cfg.metrics.pic_T);
  apply(o.pic_eps, cfg.metrics.pic_eps);
  if (o.wmota_weights) cfg.metrics.wmota_weights = std::make_pair((*o.wmota_weights)[0], (*o.wmota_weights)[1]);
  cfg.predictor.planner = cfg.planner;

  try {
    cfg.field.validate();
    cfg.metrics.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (cfg.workers < 1) throw UsageError("--workers must be >= 1");
  if (cfg.predictor.window < 1) throw UsageError("--window must be >= 1");
  return cfg;
}

/// Scenario files named directly, or listed by a manifest CSV / directory manifest.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const std::string& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) p /= "manifest.csv";
    if (!fs::exists(p)) throw std::runtime_error("input not found: " + p.string());
    if (p.extension() != ".csv") {
      out.push_back(p);
      continue;
    }
    std::ifstream m(p);
    std::string line;
    std::getline(m, line);
    if (line != "kind,seed,path") throw std::runtime_error(p.string() + ": not a scenario manifest");
    while (std::getline(m, line)) {
      if (line.empty()) continue;
      const auto last = line.rfind(',');
      if (last == std::string::npos) throw std::runtime_error(p.string() + ": malformed manifest line");
      out.push_back(p.parent_path() / line.substr(last + 1));
    }
  }
  return out;
}

fs::path ensure_out_dir(const std::optional<std::string>& out) {
  fs::path dir = out ? fs::path(*out) : fs::path(".");
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::vector<std::string> kinds;
  int count = 1;
  int frames = 40;
  int lane_width = 8;
  double jitter = 1.0;
  double ego_speed = 2.5;
  std::optional<std::string> out;
};

int cmd_gen(const GenArgs& a, const Overrides& o) {
  const RunConfig cfg = load_config(o);
  std::vector<ScenarioKind> kinds;
  for (const std::string& k : a.kinds) {
    if (k == "all") {
      kinds.insert(kinds.end(), kAllScenarioKinds.begin(), kAllScenarioKinds.end());
      continue;
    }
    auto kind = parse_kind(k);
    if (!kind) throw UsageError("unknown scenario kind '" + k + "'");
    kinds.push_back(*kind);
  }
  if (a.count < 1) throw UsageError("--count must be >= 1");

  const fs::path dir = ensure_out_dir(a.out);
  std::ofstream manifest(dir / "manifest.csv", std::ios::binary);
  manifest << "kind,seed,path\n";
  for (ScenarioKind kind : kinds) {
    for (int i = 0; i < a.count; ++i) {
      GeneratorConfig g;
      g.seed = cfg.seed + static_cast<std::uint64_t>(i);
      g.kind = kind;
      g.frame_count = a.frames;
      g.lane_width = a.lane_width;
      g.jitter = a.jitter;
      g.ego_speed = a.ego_speed;
      g.window = cfg.predictor.window;
      const Scenario s = generate(g);
      const std::string file = s.id + ".json";
      write_scenario(s, dir / file);
      manifest << kind_name(kind) << ',' << g.seed << ',' << file << '\n';
      std::size_t risk_frames = s.gt_risk.size();
      std::cout << file << ": " << s.frames.size() << " frames, " << s.tracklets.size() << " tracklets, "
                << risk_frames << " risk frames, critical frame "
                << (s.critical_frame ? std::to_string(*s.critical_frame) : "none") << '\n';
    }
  }
  return 0;
}

// ---------------------------------------------------------------- render

struct RenderArgs {
  std::string scenario;
  std::vector<int> frames;
  std::optional<std::string> out;
};

int cmd_render(const RenderArgs& a, const Overrides& o) {
  const RunConfig cfg = load_config(o);
  const Scenario s = read_scenario(a.scenario);
  std::vector<int> frames = a.frames;
  if (frames.empty() && !s.frames.empty()) frames.push_back(static_cast<int>(s.frames.size()) - 1);
  for (int f : frames) {
    if (f < 0 || static_cast<std::size_t>(f) >= s.frames.size()) {
      throw std::runtime_error("frame " + std::to_string(f) + " not in scenario (" + std::to_string(s.frames.size()) +
                               " frames)");
    }
  }
  const fs::path dir = ensure_out_dir(a.out);
  const std::string stem = s.id.empty() ? fs::path(a.scenario).stem().string() : s.id;
  for (int f : frames) {
    const Frame& fr = s.frames[static_cast<std::size_t>(f)];
    const PotentialField field = render_field(fr.grid, fr.target, cfg.field);
    const Path path = plan(field, fr.ego, fr.target, cfg.planner);
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_f%03d", f);
    const fs::path pgm = dir / (stem + suffix + "_field.pgm");
    const fs::path ppm = dir / (stem + suffix + "_overlay.ppm");
    write_pgm16(pgm, s.spec.cols, s.spec.rows, field_to_gray16(field, cfg.field.k_dynamic));
    write_ppm(ppm, s.spec.cols, s.spec.rows,
              field_overlay(field, fr.grid, path, clamp_target(s.spec, fr.target), cfg.field.k_dynamic));
    std::cout << pgm.filename().string() << ", " << ppm.filename().string() << ": path "
              << path.waypoints.size() << " waypoints, " << terminal_name(path.terminal) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::vector<std::string> inputs;
  std::string method = "bcp";
  bool timing = false;
  std::optional<std::string> out;
};

void write_run_manifest(const fs::path& path, const ScoreArgs& a, const RunConfig& cfg,
                        const std::vector<fs::path>& scenarios) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const fs::path& p : scenarios) inputs.push_back(p.string());
  const nlohmann::json doc = {
      {"inputs", inputs},
      {"method", a.method},
      {"field",
       {{"k_roadline", cfg.field.k_roadline},
        {"k_dynamic", cfg.field.k_dynamic},
        {"k_other", cfg.field.k_other},
        {"k_attractive", cfg.field.k_attractive},
        {"d_min", cfg.field.d_min}}},
      {"planner", {{"goal_radius", cfg.planner.goal_radius}, {"max_steps", cfg.planner.max_steps}}},
      {"predictor",
       {{"saturation", cfg.predictor.saturation},
        {"lookahead", cfg.predictor.lookahead},
        {"window", cfg.predictor.window}}},
      {"workers", cfg.workers},
      {"seed", cfg.seed},
      {"timing", a.timing},
  };
  std::ofstream out(path, std::ios::binary);
  out << doc.dump(2) << '\n';
}

int cmd_score(const ScoreArgs& a, const Overrides& o) {
  const RunConfig cfg = load_config(o);
  const auto method = parse_method(a.method);
  if (!method) throw UsageError("unknown method '" + a.method + "' (expected bcp, oade or ofde)");
  const std::vector<fs::path> paths = expand_inputs(a.inputs);
  if (paths.empty()) throw UsageError("no scenarios given");

  const RuleBasedPredictor predictor(cfg.predictor);
  const ScoringOptions opts{cfg.field, cfg.planner, cfg.workers};
  std::vector<RiskReport> reports;
  for (const fs::path& p : paths) {
    Scenario s = read_scenario(p);
    if (s.id.empty()) s.id = p.stem().string();
    if (auto v = validate_scenario(s); !v.empty()) throw std::runtime_error(p.string() + ": " + v.front());
    reports.push_back(run_pipeline(s, *method, predictor, opts));
    std::size_t scored = 0;
    double latency = 0.0;
    for (const FrameScores& f : reports.back().frames) {
      if (!f.scored) continue;
      ++scored;
      latency += f.latency_ms;
    }
    std::cerr << s.id << ": " << scored << " frames scored, mean latency "
              << (scored ? latency / static_cast<double>(scored) : 0.0) << " ms\n";
  }

  const fs::path dir = ensure_out_dir(a.out);
  const fs::path csv = dir / ("report_" + a.method + ".csv");
  std::ofstream out(csv, std::ios::binary);
  write_report_csv(out, reports, a.timing);
  write_run_manifest(dir / ("run_" + a.method + ".json"), a, cfg, paths);
  std::cout << csv.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::vector<std::string> reports;
  std::vector<std::string> scenarios;
  std::optional<std::string> out;
};

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

int cmd_eval(const EvalArgs& a, const Overrides& o) {
  const RunConfig cfg = load_config(o);
  std::vector<RiskReport> reports;
  for (const std::string& r : a.reports) {
    std::ifstream in(r);
    if (!in) throw std::runtime_error("cannot open report " + r);
    auto part = read_report_csv(in);
    reports.insert(reports.end(), part.begin(), part.end());
  }
  if (reports.empty()) throw std::runtime_error("no report rows to evaluate");

  std::vector<Scenario> scenarios;
  for (const fs::path& p : expand_inputs(a.scenarios)) {
    scenarios.push_back(read_scenario(p));
    if (scenarios.back().id.empty()) scenarios.back().id = p.stem().string();
  }

  std::map<Method, std::vector<RiskReport>> by_method;
  for (RiskReport& r : reports) by_method[r.method].push_back(std::move(r));

  const fs::path dir = ensure_out_dir(a.out);
  std::ofstream csv(dir / "metrics.csv", std::ios::binary);
  csv << "method,ot_precision,ot_recall,ot_f1,optimal_threshold";
  for (double h : cfg.metrics.ot_f1_horizons) csv << ",ot_f1_" << format_double(h) << "s";
  csv << ",pic_raw,pic_normalized,wmota,avg_latency_s,samples\n";

  std::printf("%-8s %7s %7s %7s %7s %7s %10s\n", "Method", "OT-P", "OT-R", "OT-F1", "PIC", "wMOTA", "Avg (sec)");
  std::vector<std::pair<Method, MetricSummary>> rows;
  for (const auto& [method, group] : by_method) {
    const MetricSummary m = evaluate(group, scenarios, cfg.metrics);
    rows.emplace_back(method, m);
    csv << method_name(method) << ',' << format_double(m.ot_precision) << ',' << format_double(m.ot_recall) << ','
        << format_double(m.ot_f1) << ',' << format_double(m.optimal_threshold);
    for (const auto& [h, v] : m.ot_f1_t) csv << ',' << (v ? format_double(*v) : "");
    csv << ',' << format_double(m.pic_raw) << ',' << format_double(m.pic_normalized) << ','
        << format_double(m.wmota) << ',' << format_double(m.mean_latency_s) << ',' << m.samples << '\n';
    std::printf("%-8s %7s %7s %7s %7s %7s %10.3f\n", std::string(method_name(method)).c_str(),
                pct(m.ot_precision).c_str(), pct(m.ot_recall).c_str(), pct(m.ot_f1).c_str(),
                pct(m.pic_normalized).c_str(), pct(m.wmota).c_str(), m.mean_latency_s);
  }
  std::printf("\n%-8s", "OT-F1-T");
  for (double h : cfg.metrics.ot_f1_horizons) std::printf(" %7s", (format_double(h) + "s").c_str());
  std::printf("\n");
  for (const auto& [method, m] : rows) {
    std::printf("%-8s", std::string(method_name(method)).c_str());
    for (const auto& [h, v] : m.ot_f1_t) std::printf(" %7s", v ? pct(*v).c_str() : "n/a");
    std::printf("\n");
    if (m.degenerate) std::printf("  (%s: no ground-truth positives; OT-F1 is degenerate)\n",
                                  std::string(method_name(method)).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potential-field risk object identification on BEV grids"};
  app.require_subcommand(1);
  Overrides o;

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic scenarios and a manifest");
  gen_cmd->add_option("--kind", gen.kinds, "Scenario kind(s) or 'all'")->required()->delimiter(',');
  gen_cmd->add_option("--count", gen.count, "Scenarios per kind (seeds seed..seed+count-1)");
  gen_cmd->add_option("--frames", gen.frames, "Frames per scenario");
  gen_cmd->add_option("--lane-width", gen.lane_width, "Lane width in cells");
  gen_cmd->add_option("--jitter", gen.jitter, "Placement jitter in cells");
  gen_cmd->add_option("--ego-speed", gen.ego_speed, "Ego speed in m/s");
  gen_cmd->add_option_function<std::string>("--out", [&gen](const std::string& v) { gen.out = v; },
                                            "Output directory");
  add_common_flags(gen_cmd, o);
  add_predictor_flags(gen_cmd, o);

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "Write field PGM and overlay PPM images");
  render_cmd->add_option("scenario", render.scenario, "Scenario file")->required();
  render_cmd->add_option("--frames", render.frames, "Frame indices (default: last)")->delimiter(',');
  render_cmd->add_option_function<std::string>("--out", [&render](const std::string& v) { render.out = v; },
                                               "Output directory");
  add_common_flags(render_cmd, o);
  add_field_flags(render_cmd, o);

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score risk objects and write a report CSV");
  score_cmd->add_option("inputs", score.inputs, "Scenario files, manifests, or directories")->required();
  score_cmd->add_option("--method", score.method, "bcp, oade or ofde");
  score_cmd->add_flag("--timing", score.timing, "Record wall-clock latency in the report");
  score_cmd->add_option_function<std::string>("--out", [&score](const std::string& v) { score.out = v; },
                                              "Output directory");
  add_common_flags(score_cmd, o);
  add_field_flags(score_cmd, o);
  add_predictor_flags(score_cmd, o);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate report CSVs against scenario ground truth");
  eval_cmd->add_option("--reports", eval.reports, "Report CSV files")->required();
  eval_cmd->add_option("--scenarios", eval.scenarios, "Scenario files, manifests, or directories")->required();
  eval_cmd->add_option_function<std::string>("--out", [&eval](const std::string& v) { eval.out = v; },
                                             "Output directory");
  add_common_flags(eval_cmd, o);
  add_metric_flags(eval_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, o);
    if (render_cmd->parsed()) return cmd_render(render, o);
    if (score_cmd->parsed()) return cmd_score(score, o);
    if (eval_cmd->parsed()) return cmd_eval(eval, o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
