#include "hood/dsp/pipeline.hpp"

#include <string>

#include "hood/error.hpp"

namespace hood::dsp {

namespace {

std::size_t macro_window(const DspConfig& config) {
  return config.mti == MtiMode::frame_difference ? 2 : config.micro_stack;
}

}  // namespace

std::size_t min_frames_for_pair(const DspConfig& config) {
  return config.micro_stack - 1 + config.erespd_window;
}

std::vector<PairedRdi> preprocess_recording(std::span<const radar::FrameCube> frames, const DspConfig& config) {
  config.validate();
  const std::size_t needed = min_frames_for_pair(config);
  if (frames.size() < needed) {
    throw ValidationError("preprocessing needs at least " + std::to_string(needed) + " frames, got " +
                          std::to_string(frames.size()));
  }
  if (macro_window(config) > config.micro_stack) throw ValidationError("macro MTI window exceeds micro stack");
  for (const auto& f : frames) {
    if (f.n_rx != frames.front().n_rx || f.n_chirps != frames.front().n_chirps ||
        f.n_samples != frames.front().n_samples) {
      throw ShapeError("recording frames differ in shape");
    }
  }

  const std::size_t first = config.micro_stack - 1;
  const auto count = static_cast<std::ptrdiff_t>(frames.size() - first);
  RdiSequence macro{std::vector<RdiFrame>(static_cast<std::size_t>(count)), RdiKind::macro};
  RdiSequence micro{std::vector<RdiFrame>(static_cast<std::size_t>(count)), RdiKind::micro};
  const std::size_t mw = macro_window(config);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const std::size_t k = first + static_cast<std::size_t>(i);
    macro.frames[static_cast<std::size_t>(i)] = compute_macro_rdi(frames.subspan(k + 1 - mw, mw), config);
    micro.frames[static_cast<std::size_t>(i)] =
        compute_micro_rdi(frames.subspan(k + 1 - config.micro_stack, config.micro_stack), config);
  }

  const auto macro_acc = erespd(macro, config.erespd_window);
  const auto micro_acc = erespd(micro, config.erespd_window);
  std::vector<PairedRdi> out(macro_acc.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].macro = normalize_rdi(macro_acc.frames[i]);
    out[i].micro = normalize_rdi(micro_acc.frames[i]);
    out[i].frame_index = macro_acc.frames[i].frame_index;
    out[i].last_frame_index = out[i].frame_index + config.erespd_window - 1;
  }
  return out;
}

RdiPipeline::RdiPipeline(const DspConfig& config)
    : config_(config), macro_acc_(config.erespd_window), micro_acc_(config.erespd_window) {
  config_.validate();
}

std::optional<PairedRdi> RdiPipeline::push(const radar::FrameCube& frame) {
  if (frames_seen_ == 0) {
    n_rx_ = frame.n_rx;
    n_chirps_ = frame.n_chirps;
    n_samples_ = frame.n_samples;
  } else if (frame.n_rx != n_rx_ || frame.n_chirps != n_chirps_ || frame.n_samples != n_samples_) {
    throw ShapeError("frame stream changed shape mid-stream");
  }
  if (frame.data.size() != n_rx_ * n_chirps_ * n_samples_) throw ShapeError("frame cube payload size mismatch");
  ++frames_seen_;

  macro_profiles_.push_back(range_profiles(frame, false));
  micro_profiles_.push_back(range_profiles(frame, true));
  if (micro_profiles_.size() > config_.micro_stack) micro_profiles_.pop_front();
  const std::size_t mw = macro_window(config_);
  if (macro_profiles_.size() > mw) macro_profiles_.pop_front();
  if (micro_profiles_.size() < config_.micro_stack) return std::nullopt;

  const std::vector<RangeProfiles> macro_window_profiles(macro_profiles_.begin(), macro_profiles_.end());
  const std::vector<RangeProfiles> micro_window_profiles(micro_profiles_.begin(), micro_profiles_.end());
  auto macro = macro_acc_.push(macro_rdi_from_profiles(macro_window_profiles, config_));
  auto micro = micro_acc_.push(micro_rdi_from_profiles(micro_window_profiles, config_));
  if (!macro || !micro) return std::nullopt;

  PairedRdi out;
  out.macro = normalize_rdi(*macro);
  out.micro = normalize_rdi(*micro);
  out.frame_index = macro->frame_index;
  out.last_frame_index = frame.frame_index;
  return out;
}

}  // namespace hood::dsp
