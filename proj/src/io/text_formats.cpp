#include "hood/io/text_formats.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hood/error.hpp"
#include "hood/io/binary.hpp"

namespace hood::io {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string(what) + ": malformed JSON (" + e.what() + ")");
  }
}

void require_object(const json& j, const char* what, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw SchemaError(std::string(what) + ": expected a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw SchemaError(std::string(what) + ": unknown key '" + k + "'");
  }
}

template <typename T>
T get(const json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string(what) + ": missing or mistyped key '" + key + "'");
  }
}

template <typename T>
void get_optional(const json& j, const char* key, T& dst, const char* what) {
  if (j.contains(key)) dst = get<T>(j, key, what);
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ------------------------------------------------------------------ scene

std::string scene_to_json(const radar::Scene& scene) {
  ordered_json j;
  j["category"] = std::string(radar::to_string(scene.category));
  j["duration"] = scene.duration;
  j["noise_std"] = scene.noise_std;
  j["seed"] = scene.seed;
  j["targets"] = ordered_json::array();
  for (const auto& t : scene.targets) {
    ordered_json o;
    o["kind"] = std::string(radar::to_string(t.kind));
    o["range"] = t.range;
    o["azimuth"] = t.azimuth;
    o["rcs_amplitude"] = t.rcs_amplitude;
    o["breath_rate"] = t.breath_rate;
    o["chest_amplitude"] = t.chest_amplitude;
    o["sway_amplitude"] = t.sway_amplitude;
    o["sway_rate"] = t.sway_rate;
    o["velocity"] = t.velocity;
    o["travel"] = t.travel;
    o["blade_rate"] = t.blade_rate;
    o["sideband_level"] = t.sideband_level;
    j["targets"].push_back(o);
  }
  return j.dump(2) + "\n";
}

radar::Scene scene_from_json(const std::string& text) {
  constexpr const char* what = "scene";
  const json j = parse(text, what);
  require_object(j, what, {"category", "duration", "noise_std", "seed", "targets"});
  radar::Scene s;
  if (j.contains("category")) {
    const auto name = get<std::string>(j, "category", what);
    const auto c = radar::parse_category(name);
    if (!c) throw SchemaError("scene: unknown category '" + name + "'");
    s.category = *c;
  }
  get_optional(j, "duration", s.duration, what);
  get_optional(j, "noise_std", s.noise_std, what);
  get_optional(j, "seed", s.seed, what);
  if (j.contains("targets")) {
    if (!j["targets"].is_array()) throw SchemaError("scene: 'targets' must be an array");
    for (const auto& o : j["targets"]) {
      constexpr const char* twhat = "scene target";
      require_object(o, twhat,
                     {"kind", "range", "azimuth", "rcs_amplitude", "breath_rate", "chest_amplitude", "sway_amplitude",
                      "sway_rate", "velocity", "travel", "blade_rate", "sideband_level"});
      radar::TargetSpec t;
      const auto kind = get<std::string>(o, "kind", twhat);
      const auto k = radar::parse_target_kind(kind);
      if (!k) throw SchemaError("scene: unknown target kind '" + kind + "'");
      t.kind = *k;
      get_optional(o, "range", t.range, twhat);
      get_optional(o, "azimuth", t.azimuth, twhat);
      get_optional(o, "rcs_amplitude", t.rcs_amplitude, twhat);
      get_optional(o, "breath_rate", t.breath_rate, twhat);
      get_optional(o, "chest_amplitude", t.chest_amplitude, twhat);
      get_optional(o, "sway_amplitude", t.sway_amplitude, twhat);
      get_optional(o, "sway_rate", t.sway_rate, twhat);
      get_optional(o, "velocity", t.velocity, twhat);
      get_optional(o, "travel", t.travel, twhat);
      get_optional(o, "blade_rate", t.blade_rate, twhat);
      get_optional(o, "sideband_level", t.sideband_level, twhat);
      s.targets.push_back(t);
    }
  }
  s.validate();
  return s;
}

radar::Scene read_scene(const std::filesystem::path& path) { return scene_from_json(read_text(path)); }

void write_scene(const std::filesystem::path& path, const radar::Scene& scene) {
  write_file_atomic(path, scene_to_json(scene));
}

// ------------------------------------------------------------- thresholds

std::string thresholds_to_json(const detect::Thresholds& t) {
  ordered_json j;
  j["quantile"] = t.quantile;
  j["threshold_s"] = t.threshold_s;
  j["threshold_vs"] = t.threshold_vs;
  j["dataset_id"] = t.dataset_id;
  j["model_id"] = t.model_id;
  return j.dump(2) + "\n";
}

detect::Thresholds thresholds_from_json(const std::string& text) {
  constexpr const char* what = "thresholds";
  const json j = parse(text, what);
  require_object(j, what, {"quantile", "threshold_s", "threshold_vs", "dataset_id", "model_id"});
  detect::Thresholds t;
  t.quantile = get<double>(j, "quantile", what);
  t.threshold_s = get<double>(j, "threshold_s", what);
  t.threshold_vs = get<double>(j, "threshold_vs", what);
  get_optional(j, "dataset_id", t.dataset_id, what);
  get_optional(j, "model_id", t.model_id, what);
  t.validate();
  return t;
}

detect::Thresholds read_thresholds(const std::filesystem::path& path) {
  return thresholds_from_json(read_text(path));
}

void write_thresholds(const std::filesystem::path& path, const detect::Thresholds& thresholds) {
  write_file_atomic(path, thresholds_to_json(thresholds));
}

// ----------------------------------------------------------------- report

namespace {

ordered_json category_json(const metrics::CategoryMetrics& m) {
  ordered_json j;
  j["auroc"] = m.auroc;
  j["aupr_in"] = m.aupr_in;
  j["aupr_out"] = m.aupr_out;
  j["fpr95"] = m.fpr95;
  j["n_id"] = m.n_id;
  j["n_ood"] = m.n_ood;
  j["id_accept_rate"] = m.id_accept_rate;
  return j;
}

metrics::CategoryMetrics category_from(const json& j) {
  constexpr const char* what = "report category";
  require_object(j, what, {"auroc", "aupr_in", "aupr_out", "fpr95", "n_id", "n_ood", "id_accept_rate"});
  metrics::CategoryMetrics m;
  m.auroc = get<double>(j, "auroc", what);
  m.aupr_in = get<double>(j, "aupr_in", what);
  m.aupr_out = get<double>(j, "aupr_out", what);
  m.fpr95 = get<double>(j, "fpr95", what);
  m.n_id = get<std::size_t>(j, "n_id", what);
  m.n_ood = get<std::size_t>(j, "n_ood", what);
  m.id_accept_rate = get<double>(j, "id_accept_rate", what);
  return m;
}

}  // namespace

std::string report_to_json(const metrics::MetricsReport& r) {
  ordered_json j;
  j["static"] = category_json(r.static_activity);
  j["very_static"] = category_json(r.very_static);
  j["ood_reject_rate"] = r.ood_reject_rate;
  if (r.test_seconds) j["test_time_s"] = *r.test_seconds;
  return j.dump(2) + "\n";
}

metrics::MetricsReport report_from_json(const std::string& text) {
  constexpr const char* what = "report";
  const json j = parse(text, what);
  require_object(j, what, {"static", "very_static", "ood_reject_rate", "test_time_s"});
  metrics::MetricsReport r;
  r.static_activity = category_from(j.at("static"));
  r.very_static = category_from(j.at("very_static"));
  r.ood_reject_rate = get<double>(j, "ood_reject_rate", what);
  if (j.contains("test_time_s")) r.test_seconds = get<double>(j, "test_time_s", what);
  return r;
}

// ----------------------------------------------------------- radar config

radar::RadarConfig radar_config_from_json(const std::string& text, radar::RadarConfig c) {
  constexpr const char* what = "radar config";
  const json j = parse(text, what);
  require_object(j, what,
                 {"n_tx", "n_rx", "n_chirps", "n_samples", "frame_period", "chirp_spacing", "f_min", "f_max",
                  "adc_rate", "adc_bits", "quantize", "adc_full_scale"});
  get_optional(j, "n_tx", c.n_tx, what);
  get_optional(j, "n_rx", c.n_rx, what);
  get_optional(j, "n_chirps", c.n_chirps, what);
  get_optional(j, "n_samples", c.n_samples, what);
  get_optional(j, "frame_period", c.frame_period, what);
  get_optional(j, "chirp_spacing", c.chirp_spacing, what);
  get_optional(j, "f_min", c.f_min, what);
  get_optional(j, "f_max", c.f_max, what);
  get_optional(j, "adc_rate", c.adc_rate, what);
  get_optional(j, "adc_bits", c.adc_bits, what);
  get_optional(j, "quantize", c.quantize, what);
  get_optional(j, "adc_full_scale", c.adc_full_scale, what);
  c.validate();
  return c;
}

std::string radar_config_to_json(const radar::RadarConfig& c) {
  ordered_json j;
  j["n_tx"] = c.n_tx;
  j["n_rx"] = c.n_rx;
  j["n_chirps"] = c.n_chirps;
  j["n_samples"] = c.n_samples;
  j["frame_period"] = c.frame_period;
  j["chirp_spacing"] = c.chirp_spacing;
  j["f_min"] = c.f_min;
  j["f_max"] = c.f_max;
  j["adc_rate"] = c.adc_rate;
  j["adc_bits"] = c.adc_bits;
  j["quantize"] = c.quantize;
  j["adc_full_scale"] = c.adc_full_scale;
  return j.dump(2) + "\n";
}

}  // namespace hood::io
