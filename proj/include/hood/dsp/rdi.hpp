#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hood/dsp/fft.hpp"
#include "hood/radar/config.hpp"
#include "hood/radar/simulator.hpp"

namespace hood::dsp {

enum class RdiKind { macro, micro };

/// Range-Doppler magnitude image, row-major [doppler][range]. Zero Doppler
/// sits on row n_doppler / 2.
struct RdiFrame {
  std::vector<double> data;
  std::size_t n_doppler = 0;
  std::size_t n_range = 0;
  RdiKind kind = RdiKind::macro;
  std::size_t frame_index = 0;

  double at(std::size_t doppler, std::size_t range) const { return data[doppler * n_range + range]; }
  std::size_t size() const { return data.size(); }
};

struct RdiSequence {
  std::vector<RdiFrame> frames;
  RdiKind kind = RdiKind::macro;

  std::size_t size() const { return frames.size(); }
  /// Uniform kind and shape, strictly increasing frame_index.
  void validate() const;
};

enum class MtiMode { frame_difference, exponential };

struct DspConfig {
  MtiMode mti = MtiMode::frame_difference;
  double mti_alpha = 0.1;            // exponential clutter-map update rate
  std::size_t micro_stack = 8;       // frames stacked along slow time
  std::size_t micro_doppler_bins = 64;
  double sinc_cutoff = 0.1;          // fraction of the slow-time Nyquist band
  std::size_t sinc_taps = 65;
  bool log_magnitude = false;
  std::size_t erespd_window = 200;

  void validate() const;
};

/// Complex range spectrum of one frame, [chirp][range bin].
struct RangeProfiles {
  std::vector<Complex> data;
  std::size_t n_chirps = 0;
  std::size_t n_range = 0;
  std::size_t frame_index = 0;

  const Complex* chirp(std::size_t c) const { return data.data() + c * n_range; }
};

/// Hann-windowed range FFT of each chirp, averaged over the receive channels.
/// `remove_fast_time_mean` subtracts each chirp's DC before the FFT (micro chain).
RangeProfiles range_profiles(const radar::FrameCube& frame, bool remove_fast_time_mean);

/// Macro RDI: Rx-mean range spectra, MTI along slow time, Doppler FFT.
/// Needs at least two frames; the image belongs to the last frame.
RdiFrame compute_macro_rdi(std::span<const radar::FrameCube> window, const DspConfig& config = {});
RdiFrame macro_rdi_from_profiles(std::span<const RangeProfiles> window, const DspConfig& config = {});

/// Micro RDI: micro_stack frames stacked along slow time, fast/slow mean removal,
/// sinc low-pass along slow time, Doppler FFT, central band crop.
RdiFrame compute_micro_rdi(std::span<const radar::FrameCube> window, const DspConfig& config = {});
RdiFrame micro_rdi_from_profiles(std::span<const RangeProfiles> window, const DspConfig& config = {});

/// Unit-DC-gain Hann-windowed sinc low-pass kernel.
std::vector<double> sinc_kernel(std::size_t taps, double cutoff_fraction);

/// Per-image min-max scaling to [0, 1]; constant images map to zeros.
RdiFrame normalize_rdi(const RdiFrame& frame);

}  // namespace hood::dsp
