#include "hood/detect/detector.hpp"

#include <algorithm>
#include <cmath>

#include "hood/model/trainer.hpp"

namespace hood::detect {

using model::Activity;
using model::Branch;

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::presence ? "Presence" : "NoPresence";
}

void Thresholds::validate() const {
  if (!(threshold_s >= 0.0) || !(threshold_vs >= 0.0) || !std::isfinite(threshold_s) ||
      !std::isfinite(threshold_vs)) {
    throw ValidationError("thresholds must be finite and >= 0");
  }
  if (!(quantile > 0.0 && quantile <= 1.0)) throw ValidationError("calibration quantile must lie in (0, 1]");
}

template <typename T>
std::vector<CombinedErrors> combined_errors(const model::HoodModel<T>& model,
                                            std::span<const dsp::RdiFrame* const> macro,
                                            std::span<const dsp::RdiFrame* const> micro, std::size_t chunk) {
  if (macro.size() != micro.size()) throw ShapeError("combined_errors: macro and micro counts differ");
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t side = model.config().image_size;
  std::vector<CombinedErrors> out(macro.size());
  for (std::size_t begin = 0; begin < macro.size(); begin += chunk) {
    const std::size_t end = std::min(macro.size(), begin + chunk);
    const std::array<nn::Tensor<T>, 2> inputs{
        model::stack_frames<T>(macro.subspan(begin, end - begin), side),
        model::stack_frames<T>(micro.subspan(begin, end - begin), side)};
    for (auto b : model::kBranches) {
      const auto& x = inputs[static_cast<std::size_t>(b)];
      const auto latent = model.encoder(b).infer(x);
      for (auto a : model::kActivities) {
        const auto per_item = nn::mse_per_item(model.decoder(b, a).infer(latent), x);
        for (std::size_t i = 0; i < per_item.size(); ++i) {
          auto& e = out[begin + i];
          (a == Activity::static_activity ? e.err_s : e.err_vs) += static_cast<double>(per_item[i]);
        }
      }
    }
  }
  return out;
}

template <typename T>
CombinedErrors combined_errors(const model::HoodModel<T>& model, const dsp::RdiFrame& macro,
                               const dsp::RdiFrame& micro) {
  const dsp::RdiFrame* a[] = {&macro};
  const dsp::RdiFrame* b[] = {&micro};
  return combined_errors(model, std::span<const dsp::RdiFrame* const>(a), std::span<const dsp::RdiFrame* const>(b),
                         1)
      .front();
}

template <typename T>
std::vector<CombinedErrors> combined_errors(const model::HoodModel<T>& model,
                                            std::span<const model::TrainingSample> samples, std::size_t chunk) {
  std::vector<const dsp::RdiFrame*> macro;
  std::vector<const dsp::RdiFrame*> micro;
  for (const auto& s : samples) {
    macro.push_back(&s.macro);
    micro.push_back(&s.micro);
  }
  return combined_errors(model, std::span<const dsp::RdiFrame* const>(macro),
                         std::span<const dsp::RdiFrame* const>(micro), chunk);
}

double nearest_rank_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty set");
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError("quantile must lie in (0, 1]");
  for (double v : values) {
    if (std::isnan(v)) throw ValidationError("quantile input contains NaN");
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // q n that lands on an integer up to rounding (0.9 * 10) must not round up.
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9 * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

Thresholds calibrate_from_errors(std::span<const double> static_err_s, std::span<const double> very_static_err_vs,
                                 double q) {
  if (static_err_s.empty()) throw ValidationError("calibrate: no static ID samples");
  if (very_static_err_vs.empty()) throw ValidationError("calibrate: no very_static ID samples");
  Thresholds t;
  t.quantile = q;
  t.threshold_s = nearest_rank_quantile({static_err_s.begin(), static_err_s.end()}, q);
  t.threshold_vs = nearest_rank_quantile({very_static_err_vs.begin(), very_static_err_vs.end()}, q);
  t.validate();
  return t;
}

template <typename T>
Thresholds calibrate(const model::HoodModel<T>& model, std::span<const model::TrainingSample> id_samples, double q) {
  const auto errors = combined_errors(model, id_samples);
  std::vector<double> s;
  std::vector<double> vs;
  for (std::size_t i = 0; i < id_samples.size(); ++i) {
    if (model::activity_of(id_samples[i].category) == Activity::static_activity) {
      s.push_back(errors[i].err_s);
    } else {
      vs.push_back(errors[i].err_vs);
    }
  }
  return calibrate_from_errors(s, vs, q);
}

Verdict infer(const CombinedErrors& errors, const Thresholds& thresholds) {
  if (errors.err_s > thresholds.threshold_s && errors.err_vs > thresholds.threshold_vs) return Verdict::no_presence;
  return Verdict::presence;
}

template <typename T>
PresenceDetector<T>::PresenceDetector(const model::HoodModel<T>& model, Thresholds thresholds,
                                      DetectorOptions options)
    : model_(model), thresholds_(std::move(thresholds)), options_(std::move(options)), pipeline_(options_.dsp) {
  thresholds_.validate();
}

template <typename T>
std::optional<DetectionResult> PresenceDetector<T>::push(const radar::FrameCube& frame) {
  auto pair = pipeline_.push(frame);
  if (!pair) return std::nullopt;
  const auto errors = combined_errors(model_, pair->macro, pair->micro);
  DetectionResult r;
  r.err_s = errors.err_s;
  r.err_vs = errors.err_vs;
  r.frame_index = pair->last_frame_index;
  r.verdict = infer(errors, thresholds_);
  if (options_.smoothing_window > 1) {
    recent_.push_back(r.verdict);
    if (recent_.size() > options_.smoothing_window) recent_.pop_front();
    const auto absent = std::count(recent_.begin(), recent_.end(), Verdict::no_presence);
    r.verdict = 2 * static_cast<std::size_t>(absent) > recent_.size() ? Verdict::no_presence : Verdict::presence;
  }
  return r;
}

template <typename T>
std::vector<DetectionResult> detect_stream(const model::HoodModel<T>& model, const Thresholds& thresholds,
                                           std::span<const radar::FrameCube> frames,
                                           const DetectorOptions& options) {
  PresenceDetector<T> detector(model, thresholds, options);
  std::vector<DetectionResult> out;
  for (const auto& f : frames) {
    if (auto r = detector.push(f)) out.push_back(*r);
  }
  return out;
}

#define HOOD_INSTANTIATE_DETECTOR(T)                                                                           \
  template CombinedErrors combined_errors<T>(const model::HoodModel<T>&, const dsp::RdiFrame&,                \
                                             const dsp::RdiFrame&);                                           \
  template std::vector<CombinedErrors> combined_errors<T>(const model::HoodModel<T>&,                         \
                                                          std::span<const dsp::RdiFrame* const>,              \
                                                          std::span<const dsp::RdiFrame* const>, std::size_t); \
  template std::vector<CombinedErrors> combined_errors<T>(const model::HoodModel<T>&,                         \
                                                          std::span<const model::TrainingSample>, std::size_t); \
  template Thresholds calibrate<T>(const model::HoodModel<T>&, std::span<const model::TrainingSample>, double); \
  template class PresenceDetector<T>;                                                                          \
  template std::vector<DetectionResult> detect_stream<T>(const model::HoodModel<T>&, const Thresholds&,       \
                                                         std::span<const radar::FrameCube>,                   \
                                                         const DetectorOptions&);

HOOD_INSTANTIATE_DETECTOR(float)
HOOD_INSTANTIATE_DETECTOR(double)

#undef HOOD_INSTANTIATE_DETECTOR

}  // namespace hood::detect
