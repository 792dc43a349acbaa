// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run every criterion
//   acceptance --criterion 7a  run one

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "bevrisk/field.hpp"
#include "bevrisk/generator.hpp"
#include "bevrisk/metrics.hpp"
#include "bevrisk/planner.hpp"
#include "bevrisk/risk.hpp"
#include "oracles.hpp"

using namespace bevrisk;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome field_oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(8, 32);
  std::uniform_real_distribution<double> density(0.02, 0.3);
  std::uniform_int_distribution<int> instances(1, 8);
  double worst = 0.0;
  std::size_t cells = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = dim(rng), cols = dim(rng);
    const SemanticGrid g = oracle::random_grid(rng, rows, cols, density(rng), instances(rng));
    const FieldConstants c;
    const auto got = render_repulsive(g, c);
    const auto want = oracle::repulsive(g, c);
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double err = std::abs(got[i] - want[i]) / std::max(std::abs(want[i]), 1e-300);
      worst = std::max(worst, want[i] == got[i] ? 0.0 : err);
    }
    cells += got.size();
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-9 && elapsed < 10.0,
          fmt("200 grids, %zu cells, max relative error %.3g (<= 1e-9), %.2f s (< 10 s)", cells, worst, elapsed)};
}

// ---------------------------------------------------------------- 2

Outcome constants_fidelity() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) failed.emplace_back(what);
  };
  const FieldConstants c;
  expect(c.energy(SemanticLabel::RoadLine) == 400.0, "K roadline 400");
  expect(c.energy(SemanticLabel::Vehicle) == 1000.0, "K vehicle 1000");
  expect(c.energy(SemanticLabel::Pedestrian) == 1000.0, "K pedestrian 1000");
  expect(c.energy(SemanticLabel::OtherStatic) == 0.0, "K other 0");
  expect(c.k_attractive == 0.75, "K_a 0.75");

  SemanticGrid free(GridSpec{5, 5, 0.5});
  const auto zero = render_repulsive(free, c);
  expect(std::all_of(zero.begin(), zero.end(), [](double v) { return v == 0.0; }), "all-free grid is zero");

  SemanticGrid g(GridSpec{5, 5, 0.5});
  g.set({2, 2}, SemanticLabel::Vehicle, 1);
  const auto f = render_repulsive(g, c);
  const GridSpec& s = g.spec();
  expect(f[s.index({2, 2})] == 1000.0, "vehicle cell 1000");
  expect(f[s.index({2, 3})] == 1000.0, "d = 1 gives 1000");
  expect(f[s.index({2, 4})] == 250.0, "d = 2 gives 250");
  expect(f[s.index({4, 4})] == 125.0, "d^2 = 8 gives 125");

  SemanticGrid mix(GridSpec{5, 5, 0.5});
  mix.set({2, 0}, SemanticLabel::RoadLine);
  mix.set({2, 4}, SemanticLabel::Vehicle, 1);
  expect(render_repulsive(mix, c)[s.index({2, 2})] == 250.0, "max wins: 250 over 100");

  SemanticGrid other(GridSpec{5, 5, 0.5});
  other.set({1, 1}, SemanticLabel::OtherStatic);
  const auto o = render_repulsive(other, c);
  expect(std::all_of(o.begin(), o.end(), [](double v) { return v == 0.0; }), "other objects contribute nothing");

  const GridSpec big;
  const auto a = render_attractive(big, {40.0, 100.0}, c);
  expect(a[big.index({40, 100})] == 0.0, "attractive 0 at target");
  expect(a[big.index({40, 110})] == 7.5, "attractive 7.5 at 10 cells");
  expect(a[big.index({46, 108})] == 7.5, "attractive 7.5 at (6, 8) offset");

  const PotentialField pf = render_field(g, {0.0, 0.0}, c);
  bool sum_ok = true;
  for (int r = 0; r < 5; ++r) {
    for (int col = 0; col < 5; ++col) {
      const Cell p{r, col};
      sum_ok = sum_ok && pf.at(p) == f[s.index(p)] + oracle::attractive_at({0, 0}, p, 0.75);
    }
  }
  expect(sum_ok, "combined = repulsive + attractive example sums");

  std::string detail = failed.empty() ? "all constant and example values exact" : "failed:";
  for (const std::string& f_name : failed) detail += " [" + f_name + "]";
  return {failed.empty(), detail};
}

// ---------------------------------------------------------------- 3

Outcome monotone_removal() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dim(8, 40);
  std::size_t removals = 0, violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const SemanticGrid g = oracle::random_grid(rng, dim(rng), dim(rng), 0.12, 6);
    const auto base = render_repulsive(g, {});
    for (InstanceId id : g.instance_ids()) {
      ++removals;
      const auto cf = render_repulsive(remove_instance(g, id), {});
      for (std::size_t i = 0; i < base.size(); ++i) violations += cf[i] > base[i];
    }
  }
  return {violations == 0 && removals > 0,
          fmt("100 grids, %zu removals, %zu cells where repulsion rose", removals, violations)};
}

// ---------------------------------------------------------------- 4

Outcome planner_descent() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> dim(10, 100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> density(0.0, 0.03);
  std::size_t bad = 0, longest = 0;
  std::vector<double> lengths;
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = dim(rng), cols = dim(rng);
    const SemanticGrid g = oracle::random_grid(rng, rows, cols, density(rng), 6);
    const TargetPoint t{u(rng) * rows * 1.2, u(rng) * cols};
    const PotentialField f = render_field(g, t, {});
    const Cell ego{static_cast<int>(u(rng) * rows), static_cast<int>(u(rng) * cols)};
    const Path p = plan(f, {ego, 0.0}, t);
    longest = std::max(longest, p.waypoints.size());
    lengths.push_back(static_cast<double>(p.waypoints.size()));
    bool ok = !p.waypoints.empty() && p.waypoints.front() == ego && p.waypoints.size() <= 401;
    std::set<Cell> seen;
    for (std::size_t i = 0; ok && i < p.waypoints.size(); ++i) {
      ok = f.spec.contains(p.waypoints[i]) && seen.insert(p.waypoints[i]).second;
      if (ok && i > 0) ok = f.at(p.waypoints[i]) < f.at(p.waypoints[i - 1]);
    }
    bad += !ok;
  }
  std::sort(lengths.begin(), lengths.end());
  return {bad == 0, fmt("100 fields, %zu invalid paths, median %.0f and longest %zu waypoints (<= 401)", bad,
                        lengths[lengths.size() / 2], longest)};
}

// ---------------------------------------------------------------- 5

Outcome metric_fixtures() {
  const MetricConfig cfg;
  const std::vector<double> ones(60, 1.0), halves(60, 0.5);
  const double pic_one = pic(ones, cfg);
  const double pic_half = pic(halves, cfg);
  const double closed = std::log(2.0) * (1.0 - std::exp(-1.0)) / (1.0 - std::exp(-1.0 / 60.0));
  const bool pic_ok = pic_one == 0.0 && std::abs(pic_half - closed) <= 1e-9 * closed;

  const std::vector<Decision> perfect{
      {0, 0, 1, true, true}, {0, 0, 2, false, false}, {0, 1, 1, true, true}, {0, 1, 2, false, false}};
  const std::vector<Decision> wrong{
      {0, 0, 1, false, true}, {0, 0, 2, true, false}, {0, 1, 1, false, true}, {0, 1, 2, true, false}};
  const double w_perfect = wmota(perfect, cfg);
  const double w_wrong = wmota(wrong, cfg);

  const std::vector<Sample> three{{0.9, true}, {0.2, false}, {0.8, false}};
  const SweepResult sweep = sweep_optimal_f1(three);

  const bool ok = pic_ok && w_perfect == 1.0 && w_wrong == 0.0 && sweep.threshold == 0.9 && sweep.f1 == 1.0;
  return {ok, fmt("PIC(1)=%g, PIC(0.5)=%.12g vs %.12g, wMOTA perfect=%g wrong=%g, sweep threshold %g F1 %g", pic_one,
                  pic_half, closed, w_perfect, w_wrong, sweep.threshold, sweep.f1)};
}

// ---------------------------------------------------------------- 6

Outcome opposite_lane_behavior() {
  const RuleBasedPredictor predictor;
  std::size_t opp_frames = 0, opp_quiet = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeneratorConfig cfg;
    cfg.kind = ScenarioKind::OppositeLane;
    cfg.seed = seed;
    const RiskReport r = run_pipeline(generate(cfg), Method::Bcp, predictor, {});
    for (const FrameScores& f : r.frames) {
      if (!f.scored) continue;
      ++opp_frames;
      auto it = f.scores.find(1);
      opp_quiet += it == f.scores.end() || std::abs(it->second) < 0.05;
    }
  }
  std::size_t ped_frames = 0, ped_top = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeneratorConfig cfg;
    cfg.kind = ScenarioKind::BlockingPedestrian;
    cfg.seed = seed;
    const RiskReport r = run_pipeline(generate(cfg), Method::Bcp, predictor, {});
    for (const FrameScores& f : r.frames) {
      if (!f.scored) continue;
      ++ped_frames;
      auto it = f.scores.find(1);
      if (it == f.scores.end()) continue;
      bool top = true;
      for (const auto& [id, v] : f.scores) top = top && (id == 1 || it->second > v);
      ped_top += top;
    }
  }
  const double opp = static_cast<double>(opp_quiet) / static_cast<double>(std::max<std::size_t>(opp_frames, 1));
  const double ped = static_cast<double>(ped_top) / static_cast<double>(std::max<std::size_t>(ped_frames, 1));
  return {opp >= 0.95 && ped >= 0.95,
          fmt("opposite-lane |score| < 0.05 in %.1f%% of %zu frames; pedestrian strictly top in %.1f%% of %zu "
              "frames (both >= 95%%)",
              100.0 * opp, opp_frames, 100.0 * ped, ped_frames)};
}

// ---------------------------------------------------------------- 7

/// Generated blocking-pedestrian scene plus parked pedestrians and vehicles on
/// the shoulders so that `candidates` instances are present in every frame.
Scenario crowded_scenario(int candidates) {
  GeneratorConfig cfg;
  cfg.kind = ScenarioKind::BlockingPedestrian;
  cfg.seed = 7;
  cfg.frame_count = 30;
  Scenario s = generate(cfg);
  int next = 100;
  const int extra = candidates - static_cast<int>(s.frames[4].grid.instance_ids().size());
  for (int k = 0; k < extra; ++k, ++next) {
    const bool vehicle = k % 2 == 0;
    const int row = 5 + 9 * (k / 2 % 10);
    const int col = k % 4 < 2 ? 60 + (k % 2) * 6 : 140 + (k % 2) * 6;
    for (Frame& fr : s.frames) {
      for (int r = row; r < row + (vehicle ? 8 : 2); ++r) {
        for (int c = col; c < col + (vehicle ? 4 : 2); ++c) {
          if (fr.grid.spec().contains({r, c})) {
            fr.grid.set({r, c}, vehicle ? SemanticLabel::Vehicle : SemanticLabel::Pedestrian, next);
          }
        }
      }
    }
  }
  s.tracklets = collect_tracklets(s.frames);
  s.gt_risk.clear();
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome latency_anchor() {
  const Scenario s = crowded_scenario(10);
  const RuleBasedPredictor predictor;
  std::vector<double> ms;
  std::size_t candidates = 0;
  for (int rep = 0; rep < 3; ++rep) {
    for (int f = 4; f < static_cast<int>(s.frames.size()); ++f) {
      const auto t0 = Clock::now();
      const FrameScores fs = score_bcp(s, f, predictor, {{}, {}, 1});
      ms.push_back(1000.0 * seconds_since(t0));
      candidates = std::max(candidates, fs.scores.size());
    }
  }
  const double med = median(ms);
  return {med < 50.0 && candidates == 10,
          fmt("100x200 grid, %zu candidates, 5-frame window, 1 worker: median %.2f ms over %zu frames (< 50 ms)",
              candidates, med, ms.size())};
}

Outcome parallel_speedup() {
  const Scenario s = crowded_scenario(16);
  const RuleBasedPredictor predictor;
  auto timed = [&](int workers, std::vector<FrameScores>& out) {
    std::vector<double> ms;
    out.clear();
    for (int f = 4; f < 16; ++f) {
      const auto t0 = Clock::now();
      FrameScores fs = score_bcp(s, f, predictor, {{}, {}, workers});
      ms.push_back(1000.0 * seconds_since(t0));
      fs.latency_ms = 0.0;
      out.push_back(std::move(fs));
    }
    return median(ms);
  };
  std::vector<FrameScores> one, four;
  const double t1 = timed(1, one);
  const double t4 = timed(4, four);
  const bool identical = one == four && !one.empty() && one.front().scores.size() == 16;
  const double speedup = t1 / t4;
  return {speedup >= 2.0 && identical,
          fmt("16 candidates: median %.2f ms at 1 worker, %.2f ms at 4 workers, speedup %.2fx (>= 2x), reports %s; "
              "%u hardware threads",
              t1, t4, speedup, identical ? "bit-identical" : "DIFFER", std::thread::hardware_concurrency())};
}

// ---------------------------------------------------------------- 8

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + BEVRISK_CLI + "\" " + args + " >>\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome end_to_end_determinism() {
  const fs::path root = fs::temp_directory_path() / "bevrisk_acceptance_8";
  fs::remove_all(root);
  std::vector<std::string> failures;
  for (const char* run : {"a", "b"}) {
    const fs::path d = root / run;
    fs::create_directories(d);
    const fs::path log = d / "log.txt";
    const std::string dir = d.string();
    int rc = run_cli("gen --kind all --count 2 --seed 42 --frames 20 --out " + dir + "/scenarios", log);
    for (const char* m : {"bcp", "oade", "ofde"}) {
      if (rc == 0) rc = run_cli("score " + dir + "/scenarios --method " + m + " --workers 2 --out " + dir, log);
    }
    if (rc == 0) {
      rc = run_cli("eval --reports " + dir + "/report_bcp.csv " + dir + "/report_oade.csv " + dir +
                       "/report_ofde.csv --scenarios " + dir + "/scenarios --out " + dir,
                   log);
    }
    if (rc != 0) failures.push_back(std::string("run ") + run + " exited " + std::to_string(rc));
  }
  std::size_t compared = 0;
  if (failures.empty()) {
    std::vector<fs::path> files{"report_bcp.csv", "report_oade.csv", "report_ofde.csv", "metrics.csv",
                                "scenarios/manifest.csv"};
    for (const auto& e : fs::directory_iterator(root / "a" / "scenarios")) {
      if (e.path().extension() == ".json") files.push_back(fs::path("scenarios") / e.path().filename());
    }
    for (const fs::path& f : files) {
      ++compared;
      const std::string a = slurp(root / "a" / f);
      if (a.empty() || a != slurp(root / "b" / f)) failures.push_back(f.string() + " differs");
    }
  }
  std::string detail = fmt("gen -> score (bcp, oade, ofde) -> eval twice, %zu files compared", compared);
  for (const std::string& f : failures) detail += "; " + f;
  return {failures.empty() && compared > 0, detail};
}

struct Criterion {
  const char* id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"1", "field oracle equivalence", field_oracle_equivalence},
      {"2", "constants fidelity", constants_fidelity},
      {"3", "monotone removal", monotone_removal},
      {"4", "planner descent", planner_descent},
      {"5", "metric fixtures", metric_fixtures},
      {"6", "opposite-lane behavior", opposite_lane_behavior},
      {"7a", "latency anchor", latency_anchor},
      {"7b", "parallel speedup", parallel_speedup},
      {"8", "end-to-end determinism", end_to_end_determinism},
  };
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--criterion ID]\n", argv[0]);
      return 2;
    }
  }
  bool any = false, ok = true;
  for (const Criterion& c : all) {
    if (!only.empty() && only != c.id && !(only == "7" && c.id[0] == '7')) continue;
    any = true;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %-2s %-24s %s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  if (!any) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return ok ? 0 : 1;
}
