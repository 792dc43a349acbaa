#include "bevrisk/scenario_io.hpp"

#include <fstream>
#include <limits>
#include <json.hpp>
#include <sstream>

namespace bevrisk {

using nlohmann::json;

namespace {

json frame_to_json(const Frame& fr) {
  json labels = json::array();
  const auto ls = fr.grid.labels();
  for (std::size_t i = 0; i < ls.size();) {
    std::size_t j = i;
    while (j < ls.size() && ls[j] == ls[i]) ++j;
    labels.push_back({label_code(ls[i]), j - i});
    i = j;
  }
  json instances = json::array();
  const auto ids = fr.grid.instances();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == kNoInstance) continue;
    const Cell c = fr.grid.spec().cell_at(i);
    instances.push_back({c.row, c.col, ids[i]});
  }
  return {
      {"labels", std::move(labels)},
      {"instances", std::move(instances)},
      {"ego", {{"row", fr.ego.cell.row}, {"col", fr.ego.cell.col}, {"speed", fr.ego.speed}}},
      {"target", {{"row", fr.target.row}, {"col", fr.target.col}}},
  };
}

/// Field access with a dotted path for error messages.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  [[nodiscard]] Reader at(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    auto it = j_.find(key);
    if (it == j_.end()) throw ParseError("scenario: missing field '" + child(key) + "'");
    return {*it, child(key)};
  }
  [[nodiscard]] Reader at(std::size_t i) const {
    if (!j_.is_array() || i >= j_.size()) fail("index out of range");
    return {j_[i], path_ + "[" + std::to_string(i) + "]"};
  }
  [[nodiscard]] bool has(const char* key) const { return j_.is_object() && j_.contains(key); }
  [[nodiscard]] std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }
  [[nodiscard]] bool is_null() const { return j_.is_null(); }

  [[nodiscard]] long long integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<long long>();
  }
  [[nodiscard]] double real() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  [[nodiscard]] std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError("scenario: field '" + path_ + "': " + what); }

 private:
  [[nodiscard]] std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
};

int to_int(const Reader& r) {
  const long long v = r.integer();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) r.fail("integer out of range");
  return static_cast<int>(v);
}

Frame frame_from_json(const Reader& jf, const GridSpec& spec) {
  Frame fr{SemanticGrid(spec), {}, {}};
  const Reader labels = jf.at("labels");
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Reader pair = labels.at(i);
    if (pair.size() != 2) pair.fail("expected [label_code, run]");
    const auto label = label_from_code(to_int(pair.at(std::size_t{0})));
    if (!label) pair.at(std::size_t{0}).fail("unknown label code");
    const long long run = pair.at(1).integer();
    if (run <= 0 || cursor + static_cast<std::size_t>(run) > spec.size()) pair.at(1).fail("run exceeds grid");
    for (long long k = 0; k < run; ++k) fr.grid.set(spec.cell_at(cursor++), *label);
  }
  if (cursor != spec.size()) labels.fail("runs cover " + std::to_string(cursor) + " of " + std::to_string(spec.size()) + " cells");

  const Reader instances = jf.at("instances");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Reader t = instances.at(i);
    if (t.size() != 3) t.fail("expected [row, col, id]");
    const Cell c{to_int(t.at(std::size_t{0})), to_int(t.at(1))};
    const int id = to_int(t.at(2));
    if (!spec.contains(c)) t.fail("cell outside grid");
    if (id < 0) t.fail("instance id must be non-negative");
    fr.grid.set(c, fr.grid.label(c), id);
  }

  const Reader ego = jf.at("ego");
  fr.ego.cell = {to_int(ego.at("row")), to_int(ego.at("col"))};
  fr.ego.speed = ego.at("speed").real();
  const Reader target = jf.at("target");
  fr.target = {target.at("row").real(), target.at("col").real()};
  return fr;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json frames = json::array();
  for (const Frame& fr : s.frames) frames.push_back(frame_to_json(fr));
  json gt = json::array();
  for (const auto& [f, ids] : s.gt_risk) gt.push_back({f, json(std::vector<InstanceId>(ids.begin(), ids.end()))});
  json doc = {
      {"id", s.id},
      {"spec", {{"rows", s.spec.rows}, {"cols", s.spec.cols}, {"cell_size", s.spec.cell_size}}},
      {"fps", s.fps},
      {"frames", std::move(frames)},
      {"gt_risk", std::move(gt)},
      {"critical_frame", s.critical_frame ? json(*s.critical_frame) : json(nullptr)},
  };
  return doc.dump() + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: malformed JSON: ") + e.what());
  }
  const Reader root(doc, "");
  Scenario s;
  if (root.has("id")) s.id = root.at("id").string();
  const Reader spec = root.at("spec");
  s.spec = {to_int(spec.at("rows")), to_int(spec.at("cols")), spec.at("cell_size").real()};
  if (!s.spec.valid()) spec.fail("rows, cols must be >= 1 and cell_size > 0");
  s.fps = root.at("fps").real();

  const Reader frames = root.at("frames");
  for (std::size_t i = 0; i < frames.size(); ++i) s.frames.push_back(frame_from_json(frames.at(i), s.spec));

  const Reader gt = root.at("gt_risk");
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const Reader entry = gt.at(i);
    if (entry.size() != 2) entry.fail("expected [frame, [ids...]]");
    const int f = to_int(entry.at(std::size_t{0}));
    const Reader ids = entry.at(1);
    auto& set = s.gt_risk[f];
    for (std::size_t k = 0; k < ids.size(); ++k) set.insert(to_int(ids.at(k)));
  }
  const Reader critical = root.at("critical_frame");
  if (!critical.is_null()) s.critical_frame = to_int(critical);
  s.tracklets = collect_tracklets(s.frames);
  return s;
}

Scenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return scenario_from_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scenario file " + path.string());
  out << scenario_to_json(s);
  if (!out) throw std::runtime_error("failed writing scenario file " + path.string());
}

}  // namespace bevrisk
