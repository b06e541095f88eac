#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "hood/dsp/erespd.hpp"
#include "hood/dsp/rdi.hpp"
#include "hood/radar/simulator.hpp"

namespace hood::dsp {

/// Network-ready sample: accumulated, normalized macro and micro RDIs of the
/// same E-RESPD window. `frame_index` is the first raw frame of the window,
/// `last_frame_index` the raw frame that completed it.
struct PairedRdi {
  RdiFrame macro;
  RdiFrame micro;
  std::size_t frame_index = 0;
  std::size_t last_frame_index = 0;
};

/// Raw frames consumed before the first paired sample: micro stacking needs
/// micro_stack - 1 leading frames, E-RESPD a further window - 1.
std::size_t min_frames_for_pair(const DspConfig& config);

/// Batch chain over a whole recording: n raw frames give
/// n - (micro_stack - 1) - window + 1 samples.
std::vector<PairedRdi> preprocess_recording(std::span<const radar::FrameCube> frames, const DspConfig& config = {});

/// Streaming equivalent of preprocess_recording. Keeps the last micro_stack
/// range profiles and one E-RESPD state per RDI kind.
class RdiPipeline {
 public:
  explicit RdiPipeline(const DspConfig& config = {});

  std::optional<PairedRdi> push(const radar::FrameCube& frame);
  std::size_t frames_seen() const { return frames_seen_; }

 private:
  DspConfig config_;
  std::deque<RangeProfiles> macro_profiles_;
  std::deque<RangeProfiles> micro_profiles_;
  ErespdStream macro_acc_;
  ErespdStream micro_acc_;
  std::size_t frames_seen_ = 0;
  std::size_t n_rx_ = 0, n_chirps_ = 0, n_samples_ = 0;
};

}  // namespace hood::dsp
