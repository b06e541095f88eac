#pragma once

#include <random>

#include "hood/dsp/rdi.hpp"
#include "hood/radar/scene.hpp"

namespace hood::model {

/// One normalized macro/micro pair from the same time window.
struct TrainingSample {
  dsp::RdiFrame macro;
  dsp::RdiFrame micro;
  radar::Category category = radar::Category::static_activity;
};

struct AugmentConfig {
  bool enabled = true;
  double affine_probability = 0.5;
  double max_rotation_deg = 10.0;
  double max_translation = 0.1;  // fraction of the image side
  double scale_probability = 0.5;
  double scale_min = 0.9;
  double scale_max = 1.1;
  double hflip_probability = 0.5;
  double vflip_probability = 0.5;

  void validate() const;
};

/// Geometric transform drawn once per sample.
struct AugmentDraw {
  bool affine = false;
  double rotation_rad = 0.0;
  double shift_rows = 0.0;  // fraction of the side
  double shift_cols = 0.0;
  bool scaled = false;
  double scale = 1.0;
  bool hflip = false;
  bool vflip = false;
};

AugmentDraw draw_augmentation(std::mt19937_64& rng, const AugmentConfig& config);

/// Applies `draw` to a square image. Flip-only draws permute pixels exactly;
/// anything else resamples bilinearly with zero fill and clamps to [0, 1].
dsp::RdiFrame apply_augmentation(const dsp::RdiFrame& frame, const AugmentDraw& draw);

/// Same random transform on both frames of the sample.
TrainingSample augment(const TrainingSample& sample, std::mt19937_64& rng, const AugmentConfig& config);

}  // namespace hood::model
