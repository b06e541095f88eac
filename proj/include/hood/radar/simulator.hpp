#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hood/radar/config.hpp"
#include "hood/radar/scene.hpp"

namespace hood::radar {

/// One digitized frame, laid out [rx][chirp][sample] row-major.
struct FrameCube {
  std::vector<double> data;
  std::size_t n_rx = 0;
  std::size_t n_chirps = 0;
  std::size_t n_samples = 0;
  std::size_t frame_index = 0;
  double timestamp = 0.0;

  std::span<const double> chirp(std::size_t rx, std::size_t c) const {
    return {data.data() + (rx * n_chirps + c) * n_samples, n_samples};
  }
  std::span<double> chirp(std::size_t rx, std::size_t c) {
    return {data.data() + (rx * n_chirps + c) * n_samples, n_samples};
  }
  bool matches(const RadarConfig& config) const {
    return n_rx == config.n_rx && n_chirps == config.n_chirps && n_samples == config.n_samples &&
           data.size() == config.frame_values();
  }
};

/// splitmix64 finalizer over (seed, stream); used to derive independent
/// per-frame generators so frames can be simulated in any order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Real IF samples of one chirp starting at t0 on receive channel `rx`.
/// Each target contributes amplitude * cos(2 pi f_b n / fs + 4 pi R(t0) / lambda + rx phase);
/// `rng` is only drawn from when noise_std > 0.
std::vector<double> simulate_if_chirp(const RadarConfig& config, std::span<const TargetSpec> targets,
                                      double t0, double noise_std, std::mt19937_64& rng,
                                      std::size_t rx = 0);

FrameCube simulate_frame(const RadarConfig& config, const Scene& scene, std::size_t frame_index);

std::size_t frame_count(const RadarConfig& config, const Scene& scene);

/// All floor(duration / frame_period) frames, in order. Frames are generated
/// in parallel; output does not depend on the thread count.
std::vector<FrameCube> simulate_recording(const RadarConfig& config, const Scene& scene);

}  // namespace hood::radar
