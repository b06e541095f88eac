#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hood::radar {

enum class TargetKind {
  breathing_human,
  standing_micro_motion,
  fan,
  moving_point,
  static_reflector,
};

std::string_view to_string(TargetKind kind);
std::optional<TargetKind> parse_target_kind(std::string_view name);

/// One scatterer. Motion fields that do not apply to `kind` stay zero.
struct TargetSpec {
  TargetKind kind = TargetKind::static_reflector;
  double range = 1.0;          // m, nominal (rest) range
  double azimuth = 0.0;        // rad
  double rcs_amplitude = 1.0;  // linear IF amplitude

  double breath_rate = 0.0;      // Hz
  double chest_amplitude = 0.0;  // m
  double sway_amplitude = 0.0;   // m, standing body sway
  double sway_rate = 0.0;        // Hz
  double velocity = 0.0;         // m/s, moving_point radial speed
  double travel = 0.0;           // m, moving_point path length before turning back (0 = unbounded)
  double blade_rate = 0.0;       // Hz, fan micro-Doppler offset
  double sideband_level = 0.0;   // fan sideband amplitude relative to rcs_amplitude

  /// Instantaneous radial range at time t (seconds).
  double range_at(double t) const;

  void validate() const;
};

/// Ground-truth class a recording belongs to.
enum class Category : std::uint8_t {
  static_activity = 0,
  very_static = 1,
  ood = 2,
  unlabeled = 255,
};

std::string_view to_string(Category category);
std::optional<Category> parse_category(std::string_view name);

struct Scene {
  std::vector<TargetSpec> targets;
  double noise_std = 0.0;
  double duration = 10.0;  // s
  std::uint64_t seed = 0;
  Category category = Category::unlabeled;

  void validate() const;
};

enum class Preset {
  id_static,
  id_very_static,
  id_static_with_disturber,
  id_very_static_with_disturber,
  ood_fan,
  ood_moving_toy,
  empty_room,
};

std::string_view to_string(Preset preset);
std::optional<Preset> parse_preset(std::string_view name);
const std::vector<Preset>& all_presets();

/// Randomized scene of the named class. Human and disturber ranges are drawn
/// from 1..4 m; clutter reflectors anywhere in the room. All parameters are
/// a function of (preset, seed) only.
Scene preset_scene(Preset preset, std::uint64_t seed);

}  // namespace hood::radar
