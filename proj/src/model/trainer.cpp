#include "hood/model/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "hood/radar/simulator.hpp"

namespace hood::model {

Activity activity_of(radar::Category category) {
  switch (category) {
    case radar::Category::static_activity:
      return Activity::static_activity;
    case radar::Category::very_static:
      return Activity::very_static;
    default:
      throw ValidationError("training data must be in-distribution (static or very_static), got " +
                            std::string(radar::to_string(category)));
  }
}

template <typename T>
Tensor<T> stack_frames(std::span<const dsp::RdiFrame* const> frames, std::size_t image_size) {
  const std::size_t plane = image_size * image_size;
  Tensor<T> out({frames.size(), 1, image_size, image_size});
  for (std::size_t n = 0; n < frames.size(); ++n) {
    const auto& f = *frames[n];
    if (f.n_doppler != image_size || f.n_range != image_size || f.data.size() != plane) {
      throw ShapeError("expected " + std::to_string(image_size) + "x" + std::to_string(image_size) +
                       " RDI, got " + std::to_string(f.n_doppler) + "x" + std::to_string(f.n_range));
    }
    std::transform(f.data.begin(), f.data.end(), out.data() + n * plane, [](double v) { return static_cast<T>(v); });
  }
  return out;
}

template <typename T>
Batch<T> make_batch(std::span<const TrainingSample* const> samples, std::size_t image_size) {
  std::vector<const dsp::RdiFrame*> macro;
  std::vector<const dsp::RdiFrame*> micro;
  Batch<T> batch;
  for (const auto* s : samples) {
    macro.push_back(&s->macro);
    micro.push_back(&s->micro);
    batch.activity.push_back(activity_of(s->category));
  }
  batch.macro = stack_frames<T>(macro, image_size);
  batch.micro = stack_frames<T>(micro, image_size);
  return batch;
}

namespace {

template <typename T>
Tensor<T> gather_rows(const Tensor<T>& x, const std::vector<std::size_t>& rows) {
  Shape s = x.shape();
  s[0] = rows.size();
  Tensor<T> out(s);
  const std::size_t row = x.row_size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(x.data() + rows[i] * row, row, out.data() + i * row);
  }
  return out;
}

template <typename T>
void scatter_rows(Tensor<T>& dst, const Tensor<T>& src, const std::vector<std::size_t>& rows) {
  const std::size_t row = dst.row_size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(src.data() + i * row, row, dst.data() + rows[i] * row);
  }
}

}  // namespace

template <typename T>
LossTerms training_objective(HoodModel<T>& model, const Batch<T>& batch, bool with_gradients, bool strict) {
  const std::size_t n = batch.activity.size();
  if (batch.macro.rank() != 4 || batch.macro.dim(0) != n || batch.micro.shape() != batch.macro.shape()) {
    throw ShapeError("batch tensors disagree with the label count");
  }
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(batch.activity[i])].push_back(i);

  LossTerms out;
  for (auto a : kActivities) {
    const auto ai = static_cast<std::size_t>(a);
    out.count[ai] = members[ai].size();
    if (strict && members[ai].empty()) {
      throw ValidationError(std::string("batch has no ") + (ai == 0 ? "static" : "very_static") + " samples");
    }
  }

  for (auto b : kBranches) {
    const Tensor<T>& x = b == Branch::macro ? batch.macro : batch.micro;
    auto& encoder = model.encoder(b);
    const Tensor<T> latent = encoder.forward(x, Mode::train);
    Tensor<T> d_latent(latent.shape());
    for (auto a : kActivities) {
      const auto& rows = members[static_cast<std::size_t>(a)];
      if (rows.empty()) continue;
      auto& decoder = model.decoder(b, a);
      const Tensor<T> target = gather_rows(x, rows);
      const Tensor<T> recon = decoder.forward(gather_rows(latent, rows), Mode::train);
      const double term = static_cast<double>(nn::mse(recon, target));
      out.term[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = term;
      out.total += term;
      if (with_gradients) scatter_rows(d_latent, decoder.backward(nn::mse_backward(recon, target)), rows);
    }
    if (with_gradients) encoder.backward(d_latent);
  }
  return out;
}

// ---------------------------------------------------------------- Trainer

void TrainConfig::validate() const {
  if (batch_size < 2) throw ValidationError("train: batch size must be >= 2 (batch normalization)");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("train: learning rate must be finite and >= 0");
  }
  augment.validate();
}

template <typename T>
Trainer<T>::Trainer(HoodModel<T>& model, TrainConfig config)
    : model_(model), config_(std::move(config)), optimizer_([&] {
        nn::AdamaxConfig ac;
        ac.learning_rate = config_.learning_rate;
        return ac;
      }()) {
  config_.validate();
  optimizer_.attach(model_.parameters());
}

template <typename T>
std::vector<std::vector<std::size_t>> Trainer<T>::plan_epoch(std::span<const TrainingSample> samples,
                                                             const TrainConfig& config, std::size_t epoch) {
  std::array<std::vector<std::size_t>, 2> pools;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    pools[static_cast<std::size_t>(activity_of(samples[i].category))].push_back(i);
  }
  if (config.shuffle) {
    std::mt19937_64 rng(radar::mix_seed(config.seed, epoch));
    for (auto& p : pools) std::shuffle(p.begin(), p.end(), rng);
  }
  const std::size_t half = std::max<std::size_t>(config.batch_size / 2, 1);
  std::size_t n_batches = 0;
  for (const auto& p : pools) n_batches = std::max(n_batches, (p.size() + half - 1) / half);

  std::vector<std::vector<std::size_t>> batches(n_batches);
  for (const auto& p : pools) {
    // Near-equal contiguous chunks of at least two items each.
    const std::size_t chunks = std::min(n_batches, p.size() / 2);
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = c * p.size() / chunks;
      const std::size_t end = (c + 1) * p.size() / chunks;
      batches[c].insert(batches[c].end(), p.begin() + static_cast<std::ptrdiff_t>(begin),
                        p.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }
  std::erase_if(batches, [](const auto& b) { return b.size() < 2; });
  return batches;
}

template <typename T>
TrainResult Trainer<T>::fit(std::span<const TrainingSample> samples,
                            const std::function<void(const EpochRecord&)>& on_epoch) {
  std::array<std::size_t, 2> counts{};
  for (const auto& s : samples) ++counts[static_cast<std::size_t>(activity_of(s.category))];
  if (counts[0] == 0 || counts[1] == 0) {
    throw ValidationError("train: dataset must contain both static and very_static samples");
  }

  const std::size_t side = model_.config().image_size;
  TrainResult result;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config_.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto plan = plan_epoch(samples, config_, epoch);
    const std::uint64_t epoch_seed = radar::mix_seed(config_.seed ^ 0xa5a5a5a5ULL, epoch);
    double loss_sum = 0.0;
    for (std::size_t bi = 0; bi < plan.size(); ++bi) {
      std::vector<TrainingSample> augmented;
      augmented.reserve(plan[bi].size());
      for (std::size_t idx : plan[bi]) {
        std::mt19937_64 rng(radar::mix_seed(epoch_seed, idx));
        augmented.push_back(augment(samples[idx], rng, config_.augment));
      }
      std::vector<const TrainingSample*> ptrs;
      for (const auto& s : augmented) ptrs.push_back(&s);
      const auto batch = make_batch<T>(ptrs, side);

      model_.zero_grad();
      const auto loss = training_objective(model_, batch, true, config_.strict);
      if (!std::isfinite(loss.total)) {
        throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(bi + 1) + " (static terms " + std::to_string(loss.term[0][0]) + "/" +
                              std::to_string(loss.term[1][0]) + ", very_static terms " +
                              std::to_string(loss.term[0][1]) + "/" + std::to_string(loss.term[1][1]) + ")");
      }
      optimizer_.step();
      loss_sum += loss.total;
    }
    const double epoch_loss = plan.empty() ? 0.0 : loss_sum / static_cast<double>(plan.size());
    result.loss_curve.push_back(epoch_loss);
    result.epochs_run = epoch;
    if (on_epoch) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      on_epoch({epoch, epoch_loss, secs});
    }
    if (epoch_loss < best) {
      best = epoch_loss;
      since_best = 0;
    } else if (config_.patience > 0 && ++since_best >= config_.patience) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

template Tensor<float> stack_frames<float>(std::span<const dsp::RdiFrame* const>, std::size_t);
template Tensor<double> stack_frames<double>(std::span<const dsp::RdiFrame* const>, std::size_t);
template Batch<float> make_batch<float>(std::span<const TrainingSample* const>, std::size_t);
template Batch<double> make_batch<double>(std::span<const TrainingSample* const>, std::size_t);
template LossTerms training_objective<float>(HoodModel<float>&, const Batch<float>&, bool, bool);
template LossTerms training_objective<double>(HoodModel<double>&, const Batch<double>&, bool, bool);
template class Trainer<float>;
template class Trainer<double>;

}  // namespace hood::model
