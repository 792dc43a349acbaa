#include "bevrisk/report_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace bevrisk {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_report_csv(std::ostream& os, std::span<const RiskReport> reports, bool include_timing) {
  os << kReportCsvHeader << '\n';
  for (const RiskReport& r : reports) {
    if (r.scenario_id.find_first_of(",\n\"") != std::string::npos) {
      throw std::invalid_argument("scenario id '" + r.scenario_id + "' cannot be written to CSV");
    }
    for (const FrameScores& f : r.frames) {
      if (!f.scored) continue;
      const std::string s_orig = f.s_orig ? format_double(*f.s_orig) : "";
      const std::string latency = include_timing ? format_double(f.latency_ms) : "0";
      const auto prefix = [&] { os << r.scenario_id << ',' << f.frame << ','; };
      if (f.scores.empty()) {
        prefix();
        os << ',' << method_name(r.method) << ",," << s_orig << ',' << latency << '\n';
        continue;
      }
      for (const auto& [id, score] : f.scores) {
        prefix();
        os << id << ',' << method_name(r.method) << ',' << format_double(score) << ',' << s_orig << ',' << latency
           << '\n';
      }
    }
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& s, std::size_t line, const char* column) {
  T v{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) {
    throw ParseError("report line " + std::to_string(line) + ": bad " + column + " '" + s + "'");
  }
  return v;
}

double parse_real(const std::string& s, std::size_t line, const char* column) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return parse_number<double>(s, line, column);
}

}  // namespace

std::vector<RiskReport> read_report_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("report: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kReportCsvHeader) throw ParseError("report line 1: unexpected header '" + line + "'");

  std::vector<RiskReport> reports;
  std::map<std::pair<std::string, Method>, std::size_t> index;
  std::vector<std::map<int, FrameScores>> frames;

  for (std::size_t lineno = 2; std::getline(is, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split(line);
    if (cols.size() != 7) {
      throw ParseError("report line " + std::to_string(lineno) + ": expected 7 columns, got " +
                       std::to_string(cols.size()));
    }
    const auto method = parse_method(cols[3]);
    if (!method) throw ParseError("report line " + std::to_string(lineno) + ": unknown method '" + cols[3] + "'");
    if (cols[0].empty()) throw ParseError("report line " + std::to_string(lineno) + ": empty scenario_id");

    auto key = std::make_pair(cols[0], *method);
    auto [it, inserted] = index.try_emplace(key, reports.size());
    if (inserted) {
      reports.push_back(RiskReport{.scenario_id = cols[0], .method = *method, .frames = {}});
      frames.emplace_back();
    }
    const int frame = parse_number<int>(cols[1], lineno, "frame");
    FrameScores& fs = frames[it->second][frame];
    fs.frame = frame;
    fs.scored = true;
    if (!cols[5].empty()) fs.s_orig = parse_real(cols[5], lineno, "s_orig");
    fs.latency_ms = parse_real(cols[6], lineno, "latency_ms");
    if (cols[2].empty() != cols[4].empty()) {
      throw ParseError("report line " + std::to_string(lineno) + ": instance_id and raw_score must both be set");
    }
    if (!cols[2].empty()) {
      const auto id = parse_number<InstanceId>(cols[2], lineno, "instance_id");
      if (!fs.scores.emplace(id, parse_real(cols[4], lineno, "raw_score")).second) {
        throw ParseError("report line " + std::to_string(lineno) + ": duplicate instance " + cols[2]);
      }
    }
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (auto& [f, fs] : frames[i]) reports[i].frames.push_back(std::move(fs));
  }
  return reports;
}

}  // namespace bevrisk
