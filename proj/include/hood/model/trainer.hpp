#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hood/model/augment.hpp"
#include "hood/model/hood_model.hpp"
#include "hood/nn/adamax.hpp"

namespace hood::model {

/// Stacked network inputs for one step, items grouped by activity.
template <typename T>
struct Batch {
  Tensor<T> macro;  // [N, 1, S, S]
  Tensor<T> micro;
  std::vector<Activity> activity;
};

/// Activity of an ID sample; OOD and unlabeled samples are rejected.
Activity activity_of(radar::Category category);

/// Copies frames into [N, 1, S, S] tensors; checks that every frame is S x S.
template <typename T>
Batch<T> make_batch(std::span<const TrainingSample* const> samples, std::size_t image_size);

/// Image tensor [N, 1, S, S] from a list of frames.
template <typename T>
Tensor<T> stack_frames(std::span<const dsp::RdiFrame* const> frames, std::size_t image_size);

struct LossTerms {
  double total = 0.0;
  std::array<std::array<double, 2>, 2> term{};  // [branch][activity]
  std::array<std::size_t, 2> count{};           // items per activity
};

/// Summed four-term reconstruction objective in training mode. Both encoders
/// see the whole batch; each activity's latents go to that activity's decoders
/// and its terms are averaged over its own items. An absent activity adds 0
/// unless `strict`, which makes it an error. Gradients are accumulated into the
/// model when `with_gradients`.
template <typename T>
LossTerms training_objective(HoodModel<T>& model, const Batch<T>& batch, bool with_gradients, bool strict = false);

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  AugmentConfig augment;
  std::size_t patience = 10;  // epochs without improvement before stopping, 0 disables
  bool shuffle = true;
  bool strict = false;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<double> loss_curve;
  std::size_t epochs_run = 0;
  bool stopped_early = false;
};

/// Minibatch trainer. Each minibatch takes half its items from each activity.
template <typename T>
class Trainer {
 public:
  Trainer(HoodModel<T>& model, TrainConfig config);

  TrainResult fit(std::span<const TrainingSample> samples,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

  nn::Adamax<T>& optimizer() { return optimizer_; }
  const TrainConfig& config() const { return config_; }

  /// Item indices of each minibatch of one epoch.
  static std::vector<std::vector<std::size_t>> plan_epoch(std::span<const TrainingSample> samples,
                                                          const TrainConfig& config, std::size_t epoch);

 private:
  HoodModel<T>& model_;
  TrainConfig config_;
  nn::Adamax<T> optimizer_;
};

}  // namespace hood::model
