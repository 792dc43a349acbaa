#pragma once

#include <filesystem>
#include <string>

#include "bevrisk/report_io.hpp"
#include "bevrisk/scene.hpp"

namespace bevrisk {

/// JSON scenario document. Labels are row-major run-length pairs
/// [label_code, run]; instances are a sparse [row, col, id] list. Tracklets
/// are rebuilt from the instance arrays on load. See docs/scenario-format.md.
[[nodiscard]] std::string scenario_to_json(const Scenario& s);
/// Throws ParseError with line/column or field context.
[[nodiscard]] Scenario scenario_from_json(const std::string& text);

[[nodiscard]] Scenario read_scenario(const std::filesystem::path& path);
void write_scenario(const Scenario& s, const std::filesystem::path& path);

}  // namespace bevrisk
