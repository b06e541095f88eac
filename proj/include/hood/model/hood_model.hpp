#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hood/nn/layers.hpp"
#include "hood/nn/tensor.hpp"

namespace hood::model {

using nn::Mode;
using nn::Parameter;
using nn::Shape;
using nn::Tensor;

enum class Branch : std::size_t { macro = 0, micro = 1 };
enum class Activity : std::size_t { static_activity = 0, very_static = 1 };

inline constexpr std::array<Branch, 2> kBranches{Branch::macro, Branch::micro};
inline constexpr std::array<Activity, 2> kActivities{Activity::static_activity, Activity::very_static};

struct ModelConfig {
  std::size_t image_size = 64;  // square RDI side, multiple of 4
  std::size_t latent_dim = 64;

  std::size_t bottleneck_side() const { return image_size / 4; }
  std::size_t flat_features() const { return 64 * bottleneck_side() * bottleneck_side(); }
  void validate() const;
};

/// conv(16, 3x3, /2) - BN2d - LeakyReLU - conv(64, 3x3, /2) - BN2d - LeakyReLU
/// - flatten - dense(latent) - BN1d.
template <typename T>
class Encoder {
 public:
  explicit Encoder(const ModelConfig& config);

  Tensor<T> forward(const Tensor<T>& x, Mode mode);
  Tensor<T> infer(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& d_latent);

  void init(std::mt19937_64& rng);
  void visit_parameters(const std::string& prefix, const std::function<void(const std::string&, Parameter<T>&)>& f);
  void visit_buffers(const std::string& prefix, const std::function<void(const std::string&, Tensor<T>&)>& f);

 private:
  ModelConfig config_;
  nn::Conv2d<T> conv1_;
  nn::BatchNorm<T> bn1_;
  nn::LeakyRelu<T> act1_;
  nn::Conv2d<T> conv2_;
  nn::BatchNorm<T> bn2_;
  nn::LeakyRelu<T> act2_;
  nn::Dense<T> dense_;
  nn::BatchNorm<T> bn3_;
  Shape feature_shape_;
};

/// dense(64 x side/4 x side/4) - BN1d - convT(64, 3x3, x2) - BN2d - LeakyReLU
/// - convT(16, 3x3, x2) - BN2d - LeakyReLU - conv(1, 3x3) - sigmoid.
template <typename T>
class Decoder {
 public:
  explicit Decoder(const ModelConfig& config);

  Tensor<T> forward(const Tensor<T>& latent, Mode mode);
  Tensor<T> infer(const Tensor<T>& latent) const;
  Tensor<T> backward(const Tensor<T>& d_output);

  void init(std::mt19937_64& rng);
  void visit_parameters(const std::string& prefix, const std::function<void(const std::string&, Parameter<T>&)>& f);
  void visit_buffers(const std::string& prefix, const std::function<void(const std::string&, Tensor<T>&)>& f);

 private:
  ModelConfig config_;
  nn::Dense<T> dense_;
  nn::BatchNorm<T> bn0_;
  nn::ConvTranspose2d<T> up1_;
  nn::BatchNorm<T> bn1_;
  nn::LeakyRelu<T> act1_;
  nn::ConvTranspose2d<T> up2_;
  nn::BatchNorm<T> bn2_;
  nn::LeakyRelu<T> act2_;
  nn::Conv2d<T> out_conv_;
  nn::Sigmoid<T> out_act_;
};

/// Two encoders (macro, micro) and four decoders, one per (branch, activity).
template <typename T>
class HoodModel {
 public:
  explicit HoodModel(const ModelConfig& config = {});

  const ModelConfig& config() const { return config_; }

  Encoder<T>& encoder(Branch b) { return encoders_[static_cast<std::size_t>(b)]; }
  const Encoder<T>& encoder(Branch b) const { return encoders_[static_cast<std::size_t>(b)]; }
  Decoder<T>& decoder(Branch b, Activity a) { return decoders_[index(b, a)]; }
  const Decoder<T>& decoder(Branch b, Activity a) const { return decoders_[index(b, a)]; }

  /// Eval-mode reconstruction of a [N, 1, S, S] batch through one encoder/decoder pair.
  Tensor<T> reconstruct(Branch b, Activity a, const Tensor<T>& x) const;

  /// Parameters in a fixed order with stable dotted names.
  void visit_parameters(const std::function<void(const std::string&, Parameter<T>&)>& f);
  /// Batch-norm running statistics.
  void visit_buffers(const std::function<void(const std::string&, Tensor<T>&)>& f);
  std::vector<Parameter<T>*> parameters();
  void zero_grad();

  static std::string network_name(Branch b);
  static std::string network_name(Branch b, Activity a);

 private:
  static std::size_t index(Branch b, Activity a) {
    return static_cast<std::size_t>(b) * 2 + static_cast<std::size_t>(a);
  }

  ModelConfig config_;
  std::vector<Encoder<T>> encoders_;
  std::vector<Decoder<T>> decoders_;
};

/// Seeded fan-in uniform initialization of every network.
template <typename T>
HoodModel<T> build_model(const ModelConfig& config, std::uint64_t seed);

/// Element-type conversion, parameters and running statistics alike.
template <typename To, typename From>
HoodModel<To> convert_model(HoodModel<From>& source);

}  // namespace hood::model
