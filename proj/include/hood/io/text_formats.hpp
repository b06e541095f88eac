#pragma once

#include <filesystem>
#include <string>

#include "hood/detect/detector.hpp"
#include "hood/metrics/evaluate.hpp"
#include "hood/radar/config.hpp"
#include "hood/radar/scene.hpp"

namespace hood::io {

/// JSON documents. Parsers reject unknown keys and wrong types with
/// SchemaError and validate the result.
std::string scene_to_json(const radar::Scene& scene);
radar::Scene scene_from_json(const std::string& text);
radar::Scene read_scene(const std::filesystem::path& path);
void write_scene(const std::filesystem::path& path, const radar::Scene& scene);

std::string thresholds_to_json(const detect::Thresholds& thresholds);
detect::Thresholds thresholds_from_json(const std::string& text);
detect::Thresholds read_thresholds(const std::filesystem::path& path);
void write_thresholds(const std::filesystem::path& path, const detect::Thresholds& thresholds);

std::string report_to_json(const metrics::MetricsReport& report);
metrics::MetricsReport report_from_json(const std::string& text);

/// Applies the keys present in `text` on top of `base`.
radar::RadarConfig radar_config_from_json(const std::string& text, radar::RadarConfig base = {});
std::string radar_config_to_json(const radar::RadarConfig& config);

std::string read_text(const std::filesystem::path& path);

}  // namespace hood::io
