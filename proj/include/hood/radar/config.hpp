#pragma once

#include <cstddef>

namespace hood::radar {

/// Propagation speed used throughout the simulator and the DSP bin mapping.
/// Rounded to 3e8 m/s so that range bins land on exact multiples of 0.15 m.
inline constexpr double kSpeedOfLight = 3.0e8;

/// FMCW front-end configuration. Defaults are the 60 GHz desk-sensor setup:
/// 1 Tx, 3 Rx, 64 chirps of 128 samples, 50 ms frames, 1 GHz sweep.
struct RadarConfig {
  std::size_t n_tx = 1;
  std::size_t n_rx = 3;
  std::size_t n_chirps = 64;
  std::size_t n_samples = 128;
  double frame_period = 0.050;        // s
  double chirp_spacing = 391.55e-6;   // s, chirp-to-chirp time
  double f_min = 60.1e9;              // Hz
  double f_max = 61.1e9;              // Hz
  double adc_rate = 2.0e6;            // Hz
  std::size_t adc_bits = 12;
  bool quantize = false;              // optional ADC quantization post-step
  double adc_full_scale = 1.0;

  double bandwidth() const { return f_max - f_min; }
  double center_frequency() const { return 0.5 * (f_min + f_max); }
  double wavelength() const { return kSpeedOfLight / center_frequency(); }
  /// Active ramp duration, N_s / adc_rate.
  double chirp_duration() const { return static_cast<double>(n_samples) / adc_rate; }
  double slope() const { return bandwidth() / chirp_duration(); }
  double range_resolution() const { return kSpeedOfLight / (2.0 * bandwidth()); }
  /// Largest range whose beat frequency stays below adc_rate / 2.
  double max_range() const { return 0.5 * adc_rate * kSpeedOfLight / (2.0 * slope()); }
  double velocity_resolution() const {
    return wavelength() / (2.0 * static_cast<double>(n_chirps) * chirp_spacing);
  }
  double max_velocity() const { return wavelength() / (4.0 * chirp_spacing); }
  double beat_frequency(double range) const { return 2.0 * range * slope() / kSpeedOfLight; }
  std::size_t range_bins() const { return n_samples / 2; }
  std::size_t frame_values() const { return n_rx * n_chirps * n_samples; }

  /// Throws ValidationError when an invariant does not hold.
  void validate() const;
};

}  // namespace hood::radar
