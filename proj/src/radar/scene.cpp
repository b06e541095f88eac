#include "hood/radar/scene.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "hood/error.hpp"
#include "hood/radar/simulator.hpp"

namespace hood::radar {

namespace {

constexpr std::array<std::pair<TargetKind, std::string_view>, 5> kKindNames{{
    {TargetKind::breathing_human, "breathing_human"},
    {TargetKind::standing_micro_motion, "standing_micro_motion"},
    {TargetKind::fan, "fan"},
    {TargetKind::moving_point, "moving_point"},
    {TargetKind::static_reflector, "static_reflector"},
}};

constexpr std::array<std::pair<Category, std::string_view>, 4> kCategoryNames{{
    {Category::static_activity, "static"},
    {Category::very_static, "very_static"},
    {Category::ood, "ood"},
    {Category::unlabeled, "unlabeled"},
}};

constexpr std::array<std::pair<Preset, std::string_view>, 7> kPresetNames{{
    {Preset::id_static, "id_static"},
    {Preset::id_very_static, "id_very_static"},
    {Preset::id_static_with_disturber, "id_static_with_disturber"},
    {Preset::id_very_static_with_disturber, "id_very_static_with_disturber"},
    {Preset::ood_fan, "ood_fan"},
    {Preset::ood_moving_toy, "ood_moving_toy"},
    {Preset::empty_room, "empty_room"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "unknown";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table,
                          std::string_view name) {
  for (const auto& [v, n] : table) {
    if (n == name) return v;
  }
  return std::nullopt;
}

class PresetSampler {
 public:
  PresetSampler(Preset preset, std::uint64_t seed)
      : rng_(mix_seed(seed, 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(preset) + 1))) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return uniform(0.0, 1.0) < 0.5; }

  // Closer people reflect more; 1/R keeps far targets visible above the noise floor.
  double human_amplitude(double range, double scale) { return scale * uniform(0.8, 1.2) * 2.0 / range; }

  TargetSpec standing_human() {
    TargetSpec t;
    t.kind = TargetKind::standing_micro_motion;
    t.range = uniform(1.0, 4.0);
    t.azimuth = uniform(-0.6, 0.6);
    t.rcs_amplitude = human_amplitude(t.range, 0.5);
    t.breath_rate = uniform(0.2, 0.4);
    t.chest_amplitude = uniform(2e-3, 5e-3);
    t.sway_amplitude = uniform(5e-3, 15e-3);
    t.sway_rate = uniform(0.1, 0.3);
    return t;
  }

  TargetSpec sitting_human() {
    TargetSpec t;
    t.kind = TargetKind::breathing_human;
    t.range = uniform(1.0, 4.0);
    t.azimuth = uniform(-0.6, 0.6);
    t.rcs_amplitude = human_amplitude(t.range, 0.5);
    t.breath_rate = uniform(0.15, 0.35);
    t.chest_amplitude = uniform(1.5e-3, 4e-3);
    return t;
  }

  TargetSpec fan() {
    TargetSpec t;
    t.kind = TargetKind::fan;
    t.range = uniform(1.0, 4.0);
    t.azimuth = uniform(-0.6, 0.6);
    t.rcs_amplitude = uniform(0.3, 0.6);
    t.blade_rate = uniform(80.0, 300.0);
    t.sideband_level = uniform(0.3, 0.6);
    return t;
  }

  TargetSpec moving_toy() {
    TargetSpec t;
    t.kind = TargetKind::moving_point;
    t.range = uniform(1.0, 2.5);
    t.azimuth = uniform(-0.6, 0.6);
    t.rcs_amplitude = uniform(0.2, 0.4);
    t.velocity = uniform(0.15, 0.5) * (coin() ? 1.0 : -1.0);
    if (t.velocity < 0.0) t.range += 1.5;
    t.travel = uniform(0.5, 1.5);
    return t;
  }

  TargetSpec disturber() { return coin() ? fan() : moving_toy(); }

  void add_clutter(Scene& scene) {
    const int count = 2 + static_cast<int>(uniform(0.0, 2.0));
    for (int i = 0; i < count; ++i) {
      TargetSpec t;
      t.kind = TargetKind::static_reflector;
      t.range = uniform(0.5, 6.5);
      t.azimuth = uniform(-1.0, 1.0);
      t.rcs_amplitude = uniform(0.5, 2.0);
      scene.targets.push_back(t);
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

std::string_view to_string(TargetKind kind) { return name_of(kKindNames, kind); }
std::optional<TargetKind> parse_target_kind(std::string_view name) { return value_of(kKindNames, name); }
std::string_view to_string(Category category) { return name_of(kCategoryNames, category); }
std::optional<Category> parse_category(std::string_view name) { return value_of(kCategoryNames, name); }
std::string_view to_string(Preset preset) { return name_of(kPresetNames, preset); }
std::optional<Preset> parse_preset(std::string_view name) { return value_of(kPresetNames, name); }

const std::vector<Preset>& all_presets() {
  static const std::vector<Preset> presets = [] {
    std::vector<Preset> out;
    for (const auto& [p, name] : kPresetNames) out.push_back(p);
    return out;
  }();
  return presets;
}

double TargetSpec::range_at(double t) const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (kind) {
    case TargetKind::static_reflector:
    case TargetKind::fan:
      return range;
    case TargetKind::breathing_human:
      return range + chest_amplitude * std::sin(two_pi * breath_rate * t);
    case TargetKind::standing_micro_motion:
      return range + chest_amplitude * std::sin(two_pi * breath_rate * t) +
             sway_amplitude * std::sin(two_pi * sway_rate * t);
    case TargetKind::moving_point: {
      if (travel <= 0.0) return range + velocity * t;
      const double path = std::fmod(std::abs(velocity) * t, 2.0 * travel);
      const double offset = path <= travel ? path : 2.0 * travel - path;
      return range + std::copysign(offset, velocity);
    }
  }
  return range;
}

void TargetSpec::validate() const {
  if (!(range >= 0.3 && range <= 7.0)) {
    throw ValidationError("target range " + std::to_string(range) + " m outside [0.3, 7.0]");
  }
  if (!(rcs_amplitude > 0.0)) throw ValidationError("target rcs_amplitude must be > 0");
  if (kind == TargetKind::breathing_human && !(breath_rate >= 0.1 && breath_rate <= 1.0)) {
    throw ValidationError("breathing_human breath_rate must lie in [0.1, 1.0] Hz");
  }
  if (travel < 0.0 || chest_amplitude < 0.0 || sway_amplitude < 0.0 || sideband_level < 0.0) {
    throw ValidationError("target motion amplitudes must be non-negative");
  }
}

void Scene::validate() const {
  if (!(duration > 0.0)) throw ValidationError("scene duration must be > 0");
  if (!(noise_std >= 0.0)) throw ValidationError("scene noise_std must be >= 0");
  for (const auto& t : targets) t.validate();
}

Scene preset_scene(Preset preset, std::uint64_t seed) {
  PresetSampler sampler(preset, seed);
  Scene scene;
  scene.seed = seed;
  scene.duration = 12.0;
  scene.noise_std = 0.1;
  switch (preset) {
    case Preset::id_static:
      scene.category = Category::static_activity;
      scene.targets.push_back(sampler.standing_human());
      break;
    case Preset::id_very_static:
      scene.category = Category::very_static;
      scene.targets.push_back(sampler.sitting_human());
      break;
    case Preset::id_static_with_disturber:
      scene.category = Category::static_activity;
      scene.targets.push_back(sampler.standing_human());
      scene.targets.push_back(sampler.disturber());
      break;
    case Preset::id_very_static_with_disturber:
      scene.category = Category::very_static;
      scene.targets.push_back(sampler.sitting_human());
      scene.targets.push_back(sampler.disturber());
      break;
    case Preset::ood_fan:
      scene.category = Category::ood;
      scene.targets.push_back(sampler.fan());
      break;
    case Preset::ood_moving_toy:
      scene.category = Category::ood;
      scene.targets.push_back(sampler.moving_toy());
      break;
    case Preset::empty_room:
      scene.category = Category::ood;
      break;
  }
  sampler.add_clutter(scene);
  return scene;
}

}  // namespace hood::radar
