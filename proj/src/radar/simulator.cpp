#include "hood/radar/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hood/error.hpp"

namespace hood::radar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Tone {
  double amplitude;
  double beat_frequency;  // Hz
  double phase;           // rad, at rx 0
};

// Decomposes the targets into IF tones as seen at time t0.
void collect_tones(const RadarConfig& config, std::span<const TargetSpec> targets, double t0,
                   std::vector<Tone>& tones, std::vector<double>& azimuths) {
  tones.clear();
  azimuths.clear();
  const double max_range = config.max_range();
  const double lambda = config.wavelength();
  for (const auto& target : targets) {
    const double range = target.range_at(t0);
    if (!(range > 0.0 && range < max_range)) {
      throw ValidationError("target range " + std::to_string(range) + " m at t=" + std::to_string(t0) +
                            " s outside the unambiguous span (0, " + std::to_string(max_range) + ") m");
    }
    const double fb = config.beat_frequency(range);
    const double phase = 2.0 * kTwoPi * range / lambda;
    tones.push_back({target.rcs_amplitude, fb, phase});
    azimuths.push_back(target.azimuth);
    if (target.kind == TargetKind::fan && target.sideband_level > 0.0) {
      const double offset = kTwoPi * target.blade_rate * t0;
      const double amp = target.rcs_amplitude * target.sideband_level;
      tones.push_back({amp, fb, phase + offset});
      tones.push_back({amp, fb, phase - offset});
      azimuths.push_back(target.azimuth);
      azimuths.push_back(target.azimuth);
    }
  }
}

// Receive-channel phase offset for a uniform half-wavelength array.
double rx_phase(double azimuth, std::size_t rx) {
  return std::numbers::pi * static_cast<double>(rx) * std::sin(azimuth);
}

double quantize_sample(const RadarConfig& config, double x) {
  const double levels = std::ldexp(1.0, static_cast<int>(config.adc_bits) - 1) - 1.0;
  const double code = std::clamp(std::round(x / config.adc_full_scale * levels), -levels - 1.0, levels);
  return code / levels * config.adc_full_scale;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> simulate_if_chirp(const RadarConfig& config, std::span<const TargetSpec> targets,
                                      double t0, double noise_std, std::mt19937_64& rng, std::size_t rx) {
  std::vector<Tone> tones;
  std::vector<double> azimuths;
  collect_tones(config, targets, t0, tones, azimuths);
  std::vector<double> out(config.n_samples, 0.0);
  for (std::size_t k = 0; k < tones.size(); ++k) {
    const double w = kTwoPi * tones[k].beat_frequency / config.adc_rate;
    const double phi = tones[k].phase + rx_phase(azimuths[k], rx);
    for (std::size_t n = 0; n < out.size(); ++n) {
      out[n] += tones[k].amplitude * std::cos(w * static_cast<double>(n) + phi);
    }
  }
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (auto& x : out) x += noise(rng);
  }
  return out;
}

std::size_t frame_count(const RadarConfig& config, const Scene& scene) {
  // Guard against duration / period landing just below an integer.
  return static_cast<std::size_t>(std::floor(scene.duration / config.frame_period + 1e-9));
}

FrameCube simulate_frame(const RadarConfig& config, const Scene& scene, std::size_t frame_index) {
  if (frame_index >= frame_count(config, scene)) {
    throw ValidationError("frame index " + std::to_string(frame_index) + " beyond scene duration");
  }
  FrameCube cube;
  cube.n_rx = config.n_rx;
  cube.n_chirps = config.n_chirps;
  cube.n_samples = config.n_samples;
  cube.frame_index = frame_index;
  cube.timestamp = static_cast<double>(frame_index) * config.frame_period;
  cube.data.assign(config.frame_values(), 0.0);

  std::vector<Tone> tones;
  std::vector<double> azimuths;
  std::vector<double> cos_base(config.n_samples);
  std::vector<double> sin_base(config.n_samples);
  for (std::size_t c = 0; c < config.n_chirps; ++c) {
    const double t0 = cube.timestamp + static_cast<double>(c) * config.chirp_spacing;
    collect_tones(config, scene.targets, t0, tones, azimuths);
    for (std::size_t k = 0; k < tones.size(); ++k) {
      const double w = kTwoPi * tones[k].beat_frequency / config.adc_rate;
      for (std::size_t n = 0; n < config.n_samples; ++n) {
        const double arg = w * static_cast<double>(n) + tones[k].phase;
        cos_base[n] = tones[k].amplitude * std::cos(arg);
        sin_base[n] = tones[k].amplitude * std::sin(arg);
      }
      for (std::size_t rx = 0; rx < config.n_rx; ++rx) {
        auto chirp = cube.chirp(rx, c);
        if (rx == 0) {
          for (std::size_t n = 0; n < chirp.size(); ++n) chirp[n] += cos_base[n];
          continue;
        }
        const double psi = rx_phase(azimuths[k], rx);
        const double cp = std::cos(psi);
        const double sp = std::sin(psi);
        for (std::size_t n = 0; n < chirp.size(); ++n) chirp[n] += cos_base[n] * cp - sin_base[n] * sp;
      }
    }
  }

  if (scene.noise_std > 0.0) {
    std::mt19937_64 rng(mix_seed(scene.seed, frame_index));
    std::normal_distribution<double> noise(0.0, scene.noise_std);
    for (auto& x : cube.data) x += noise(rng);
  }
  if (config.quantize) {
    for (auto& x : cube.data) x = quantize_sample(config, x);
  }
  return cube;
}

std::vector<FrameCube> simulate_recording(const RadarConfig& config, const Scene& scene) {
  config.validate();
  scene.validate();
  const auto n = static_cast<std::ptrdiff_t>(frame_count(config, scene));
  std::vector<FrameCube> frames(static_cast<std::size_t>(n));
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      frames[static_cast<std::size_t>(i)] = simulate_frame(config, scene, static_cast<std::size_t>(i));
    } catch (const std::exception& e) {
#pragma omp critical(hood_sim_failure)
      if (!failed) {
        failed = true;
        failure = e.what();
      }
    }
  }
  if (failed) throw ValidationError(failure);
  return frames;
}

}  // namespace hood::radar
