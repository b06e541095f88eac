#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hood/dsp/pipeline.hpp"
#include "hood/model/augment.hpp"
#include "hood/model/hood_model.hpp"

namespace hood::detect {

/// Macro + micro reconstruction MSE through each activity's decoder pair.
struct CombinedErrors {
  double err_s = 0.0;
  double err_vs = 0.0;
};

enum class Verdict { presence, no_presence };

std::string_view to_string(Verdict verdict);

struct Thresholds {
  double threshold_s = 0.0;
  double threshold_vs = 0.0;
  double quantile = 0.90;
  std::string dataset_id;
  std::string model_id;

  void validate() const;
};

struct DetectionResult {
  double err_s = 0.0;
  double err_vs = 0.0;
  Verdict verdict = Verdict::presence;
  std::size_t frame_index = 0;
};

template <typename T>
CombinedErrors combined_errors(const model::HoodModel<T>& model, const dsp::RdiFrame& macro,
                               const dsp::RdiFrame& micro);

/// Errors for many pairs, evaluated in chunks of `chunk` items.
template <typename T>
std::vector<CombinedErrors> combined_errors(const model::HoodModel<T>& model,
                                            std::span<const dsp::RdiFrame* const> macro,
                                            std::span<const dsp::RdiFrame* const> micro, std::size_t chunk = 64);

template <typename T>
std::vector<CombinedErrors> combined_errors(const model::HoodModel<T>& model,
                                            std::span<const model::TrainingSample> samples, std::size_t chunk = 64);

/// Sorted value at 1-based rank ceil(q n). Needs 0 < q < 1 (q = 1 is also
/// accepted and yields the maximum) and a non-empty input.
double nearest_rank_quantile(std::vector<double> values, double q);

/// Thresholds from per-activity ID errors: err_s of static samples and
/// err_vs of very-static samples.
Thresholds calibrate_from_errors(std::span<const double> static_err_s, std::span<const double> very_static_err_vs,
                                 double q = 0.90);

template <typename T>
Thresholds calibrate(const model::HoodModel<T>& model, std::span<const model::TrainingSample> id_samples,
                     double q = 0.90);

/// NoPresence exactly when both errors are strictly above their thresholds.
Verdict infer(const CombinedErrors& errors, const Thresholds& thresholds);

struct DetectorOptions {
  dsp::DspConfig dsp;
  std::size_t smoothing_window = 0;  // majority vote over this many verdicts, 0 or 1 disables
};

/// Streaming presence detector: raw frames in, one verdict per frame once the
/// micro stack and E-RESPD window are full.
template <typename T>
class PresenceDetector {
 public:
  PresenceDetector(const model::HoodModel<T>& model, Thresholds thresholds, DetectorOptions options = {});

  std::optional<DetectionResult> push(const radar::FrameCube& frame);

  /// Raw frames needed before the first verdict.
  std::size_t warmup_frames() const { return dsp::min_frames_for_pair(options_.dsp); }
  std::size_t frames_seen() const { return pipeline_.frames_seen(); }

 private:
  const model::HoodModel<T>& model_;
  Thresholds thresholds_;
  DetectorOptions options_;
  dsp::RdiPipeline pipeline_;
  std::deque<Verdict> recent_;
};

template <typename T>
std::vector<DetectionResult> detect_stream(const model::HoodModel<T>& model, const Thresholds& thresholds,
                                           std::span<const radar::FrameCube> frames,
                                           const DetectorOptions& options = {});

}  // namespace hood::detect
