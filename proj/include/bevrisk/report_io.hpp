#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bevrisk/risk.hpp"

namespace bevrisk {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kReportCsvHeader = "scenario_id,frame,instance_id,method,raw_score,s_orig,latency_ms";

/// One row per scored (frame, instance); a scored frame without candidates
/// gets one row with empty instance_id and raw_score. Unscored frames are
/// omitted. With include_timing = false latency_ms is written as 0 so that
/// output depends only on the inputs.
void write_report_csv(std::ostream& os, std::span<const RiskReport> reports, bool include_timing);

/// Groups rows by (scenario_id, method) in order of first appearance.
/// Throws ParseError with the line number on malformed input.
[[nodiscard]] std::vector<RiskReport> read_report_csv(std::istream& is);

/// Shortest round-trip decimal form.
[[nodiscard]] std::string format_double(double v);

}  // namespace bevrisk
