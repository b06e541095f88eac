#include "hood/model/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hood/error.hpp"

namespace hood::model {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void AugmentConfig::validate() const {
  if (!is_probability(affine_probability) || !is_probability(scale_probability) ||
      !is_probability(hflip_probability) || !is_probability(vflip_probability)) {
    throw ValidationError("augment: probabilities must lie in [0, 1]");
  }
  if (!(max_rotation_deg >= 0.0) || !(max_translation >= 0.0) || max_translation > 0.5) {
    throw ValidationError("augment: rotation must be >= 0 and translation in [0, 0.5]");
  }
  if (!(scale_min > 0.0) || !(scale_max >= scale_min)) {
    throw ValidationError("augment: scale range must satisfy 0 < min <= max");
  }
}

AugmentDraw draw_augmentation(std::mt19937_64& rng, const AugmentConfig& config) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Fixed number of draws per sample regardless of toggles.
  const double u_affine = unit(rng);
  const double u_rot = unit(rng);
  const double u_tr = unit(rng);
  const double u_tc = unit(rng);
  const double u_scale_on = unit(rng);
  const double u_scale = unit(rng);
  const double u_h = unit(rng);
  const double u_v = unit(rng);

  AugmentDraw d;
  if (!config.enabled) return d;
  d.affine = u_affine < config.affine_probability;
  if (d.affine) {
    d.rotation_rad = (2.0 * u_rot - 1.0) * config.max_rotation_deg * std::numbers::pi / 180.0;
    d.shift_rows = (2.0 * u_tr - 1.0) * config.max_translation;
    d.shift_cols = (2.0 * u_tc - 1.0) * config.max_translation;
  }
  d.scaled = u_scale_on < config.scale_probability;
  if (d.scaled) d.scale = config.scale_min + u_scale * (config.scale_max - config.scale_min);
  d.hflip = u_h < config.hflip_probability;
  d.vflip = u_v < config.vflip_probability;
  return d;
}

dsp::RdiFrame apply_augmentation(const dsp::RdiFrame& frame, const AugmentDraw& draw) {
  const std::size_t rows = frame.n_doppler;
  const std::size_t cols = frame.n_range;
  if (frame.data.size() != rows * cols) throw ShapeError("augment: frame data does not match its dimensions");
  dsp::RdiFrame out = frame;

  if (!draw.affine && !draw.scaled) {
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t sr = draw.vflip ? rows - 1 - r : r;
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t sc = draw.hflip ? cols - 1 - c : c;
        out.data[r * cols + c] = frame.data[sr * cols + sc];
      }
    }
    return out;
  }

  const double cr = 0.5 * static_cast<double>(rows - 1);
  const double cc = 0.5 * static_cast<double>(cols - 1);
  const double cos_t = std::cos(draw.rotation_rad);
  const double sin_t = std::sin(draw.rotation_rad);
  const double ty = draw.shift_rows * static_cast<double>(rows);
  const double tx = draw.shift_cols * static_cast<double>(cols);
  auto sample = [&](double y, double x) {
    const double fy = std::floor(y);
    const double fx = std::floor(x);
    const double wy = y - fy;
    const double wx = x - fx;
    double acc = 0.0;
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const double py = fy + dy;
        const double px = fx + dx;
        if (py < 0 || px < 0 || py > static_cast<double>(rows - 1) || px > static_cast<double>(cols - 1)) continue;
        const double w = (dy ? wy : 1.0 - wy) * (dx ? wx : 1.0 - wx);
        acc += w * frame.data[static_cast<std::size_t>(py) * cols + static_cast<std::size_t>(px)];
      }
    }
    return acc;
  };

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      // Inverse map: output pixel -> source coordinates.
      const double oy = (static_cast<double>(r) - cr - ty) / draw.scale;
      const double ox = (static_cast<double>(c) - cc - tx) / draw.scale;
      double sy = cos_t * oy + sin_t * ox + cr;
      double sx = -sin_t * oy + cos_t * ox + cc;
      if (draw.vflip) sy = static_cast<double>(rows - 1) - sy;
      if (draw.hflip) sx = static_cast<double>(cols - 1) - sx;
      out.data[r * cols + c] = std::clamp(sample(sy, sx), 0.0, 1.0);
    }
  }
  return out;
}

TrainingSample augment(const TrainingSample& sample, std::mt19937_64& rng, const AugmentConfig& config) {
  const auto draw = draw_augmentation(rng, config);
  TrainingSample out;
  out.category = sample.category;
  out.macro = apply_augmentation(sample.macro, draw);
  out.micro = apply_augmentation(sample.micro, draw);
  return out;
}

}  // namespace hood::model
