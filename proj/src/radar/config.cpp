#include "hood/radar/config.hpp"

#include <cmath>
#include <string>

#include "hood/error.hpp"

namespace hood::radar {

void RadarConfig::validate() const {
  if (n_tx < 1 || n_rx < 1 || n_chirps < 1 || n_samples < 1) {
    throw ValidationError("radar config: antenna, chirp and sample counts must be >= 1");
  }
  if (n_samples % 2 != 0) {
    throw ValidationError("radar config: n_samples must be even");
  }
  if (!(frame_period > 0.0) || !(chirp_spacing > 0.0) || !(adc_rate > 0.0)) {
    throw ValidationError("radar config: periods and ADC rate must be positive");
  }
  if (!(f_max > f_min) || !(f_min > 0.0)) {
    throw ValidationError("radar config: require 0 < f_min < f_max");
  }
  if (chirp_duration() > chirp_spacing * (1.0 + 1e-12)) {
    throw ValidationError("radar config: n_samples / adc_rate (" + std::to_string(chirp_duration()) +
                          " s) exceeds chirp spacing");
  }
  if (static_cast<double>(n_chirps) * chirp_spacing > frame_period) {
    throw ValidationError("radar config: chirps do not fit in the frame period");
  }
  if (quantize && (adc_bits < 2 || adc_bits > 24 || !(adc_full_scale > 0.0))) {
    throw ValidationError("radar config: quantization needs 2..24 bits and positive full scale");
  }
}

}  // namespace hood::radar
