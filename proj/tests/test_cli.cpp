#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bevrisk/field.hpp"
#include "bevrisk/scenario_io.hpp"

using namespace bevrisk;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bevrisk_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + BEVRISK_CLI + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t count_json(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ".json";
  return n;
}

}  // namespace

TEST_CASE("gen writes one scenario and a manifest") {
  const fs::path d = fresh_dir("gen_one");
  REQUIRE(run("gen --kind opposite-lane --seed 1 --out " + d.string(), d / "log.txt") == 0);
  CHECK(fs::exists(d / "opposite-lane-s1.json"));
  CHECK(slurp(d / "manifest.csv") == "kind,seed,path\nopposite-lane,1,opposite-lane-s1.json\n");
  CHECK(count_json(d) == 1);
  CHECK(validate_scenario(read_scenario(d / "opposite-lane-s1.json")).empty());
}

TEST_CASE("gen rejects unknown kinds and bad flags with exit 2") {
  const fs::path d = fresh_dir("gen_bad");
  CHECK(run("gen --kind flying-car --out " + d.string(), d / "log.txt") == 2);
  CHECK(slurp(d / "log.txt").find("flying-car") != std::string::npos);
  CHECK(run("gen --kind all --count 0 --out " + d.string(), d / "log.txt") == 2);
  CHECK(run("gen --out " + d.string(), d / "log.txt") == 2);
  CHECK(run("frobnicate", d / "log.txt") == 2);
}

TEST_CASE("gen with all kinds writes six scenarios") {
  const fs::path d = fresh_dir("gen_all");
  REQUIRE(run("gen --kind all --seed 3 --frames 10 --out " + d.string(), d / "log.txt") == 0);
  CHECK(count_json(d) == 6);
  std::istringstream manifest(slurp(d / "manifest.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(manifest, line)) ++rows;
  CHECK(rows == 7);
}

TEST_CASE("render writes images; obstacle cells saturate; bad frames fail") {
  const fs::path d = fresh_dir("render");
  REQUIRE(run("gen --kind blocking-vehicle --seed 2 --frames 8 --out " + d.string(), d / "log.txt") == 0);
  const fs::path scenario = d / "blocking-vehicle-s2.json";
  REQUIRE(run("render " + scenario.string() + " --frames 0,7 --out " + d.string(), d / "log.txt") == 0);
  const fs::path pgm = d / "blocking-vehicle-s2_f007_field.pgm";
  REQUIRE(fs::exists(pgm));
  CHECK(fs::exists(d / "blocking-vehicle-s2_f000_overlay.ppm"));

  const Scenario s = read_scenario(scenario);
  const std::string bytes = slurp(pgm);
  const std::string header = "P5\n200 100\n65535\n";
  REQUIRE(bytes.size() == header.size() + 2 * 200 * 100);
  CHECK(bytes.compare(0, header.size(), header) == 0);
  auto pixel = [&](Cell c) {
    const std::size_t i = header.size() + 2 * (static_cast<std::size_t>(99 - c.row) * 200 + c.col);
    return (static_cast<unsigned char>(bytes[i]) << 8) | static_cast<unsigned char>(bytes[i + 1]);
  };
  const Frame& fr = s.frames[7];
  const PotentialField f = render_field(fr.grid, fr.target, {});
  const std::vector<Cell> obstacle = fr.grid.cells_of(1);
  REQUIRE_FALSE(obstacle.empty());
  for (Cell c : obstacle) CHECK(pixel(c) == 65535);
  const Cell free_cell{0, 0};
  CHECK(pixel(free_cell) == std::lround(std::min(f.at(free_cell), 1000.0) / 1000.0 * 65535.0));

  CHECK(run("render " + scenario.string() + " --frames 8 --out " + d.string(), d / "log.txt") != 0);
  CHECK(run("render " + (d / "nope.json").string() + " --out " + d.string(), d / "log.txt") == 1);
}

TEST_CASE("render of an all-free frame is the attractive gradient") {
  const fs::path d = fresh_dir("render_free");
  Scenario s;
  s.id = "free";
  s.spec = GridSpec{4, 5, 0.5};
  s.frames.push_back({SemanticGrid(s.spec), {{0, 2}, 0.0}, {3.0, 2.0}});
  write_scenario(s, d / "free.json");
  REQUIRE(run("render " + (d / "free.json").string() + " --out " + d.string(), d / "log.txt") == 0);
  const std::string bytes = slurp(d / "free_f000_field.pgm");
  const std::string header = "P5\n5 4\n65535\n";
  REQUIRE(bytes.size() == header.size() + 40);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 5; ++c) {
      const std::size_t i = header.size() + 2 * static_cast<std::size_t>((3 - r) * 5 + c);
      const int v = (static_cast<unsigned char>(bytes[i]) << 8) | static_cast<unsigned char>(bytes[i + 1]);
      const double want = 0.75 * std::hypot(r - 3.0, c - 2.0) / 1000.0 * 65535.0;
      CHECK(v == std::lround(want));
    }
  }
}

TEST_CASE("score: pedestrian leads, interaction-free is all zero, workers do not change output") {
  const fs::path d = fresh_dir("score");
  REQUIRE(run("gen --kind blocking-pedestrian,interaction-free --seed 5 --frames 12 --out " + d.string(),
              d / "log.txt") == 0);
  REQUIRE(run("score " + d.string() + " --workers 1 --out " + (d / "w1").string(), d / "log.txt") == 0);
  REQUIRE(run("score " + d.string() + " --workers 4 --out " + (d / "w4").string(), d / "log.txt") == 0);
  const std::string csv = slurp(d / "w1" / "report_bcp.csv");
  CHECK(csv == slurp(d / "w4" / "report_bcp.csv"));
  CHECK(fs::exists(d / "w1" / "run_bcp.json"));

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::map<int, std::map<int, double>> ped;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) cols.push_back(field);
    if (line.back() == ',') cols.emplace_back();
    REQUIRE(cols.size() == 7);
    if (cols[0] == "interaction-free-s5") {
      CHECK(std::stod(cols[4]) == 0.0);
    } else {
      ped[std::stoi(cols[1])][std::stoi(cols[2])] = std::stod(cols[4]);
    }
    CHECK(cols[6] == "0");
  }
  CHECK_FALSE(ped.empty());
  for (const auto& [frame, scores] : ped) {
    if (!scores.contains(1)) continue;
    for (const auto& [id, v] : scores) {
      if (id != 1) CHECK(scores.at(1) > v);
    }
  }

  CHECK(run("score " + d.string() + " --method nope --out " + d.string(), d / "log.txt") == 2);
  CHECK(run("score " + d.string() + " --workers 0 --out " + d.string(), d / "log.txt") == 2);
}

TEST_CASE("eval prints a table and rejects empty reports") {
  const fs::path d = fresh_dir("eval");
  REQUIRE(run("gen --kind blocking-vehicle --seed 1 --count 2 --frames 10 --out " + d.string(), d / "log.txt") == 0);
  REQUIRE(run("score " + d.string() + " --method ofde --out " + d.string(), d / "log.txt") == 0);
  REQUIRE(run("eval --reports " + (d / "report_ofde.csv").string() + " --scenarios " + d.string() + " --out " +
                  d.string(),
              d / "log.txt") == 0);
  const std::string table = slurp(d / "log.txt");
  CHECK(table.find("OT-F1") != std::string::npos);
  CHECK(table.find("wMOTA") != std::string::npos);
  CHECK(slurp(d / "metrics.csv").rfind("method,ot_precision,ot_recall,ot_f1,optimal_threshold", 0) == 0);

  std::ofstream(d / "empty.csv") << "scenario_id,frame,instance_id,method,raw_score,s_orig,latency_ms\n";
  CHECK(run("eval --reports " + (d / "empty.csv").string() + " --scenarios " + d.string(), d / "log.txt") == 1);
}
