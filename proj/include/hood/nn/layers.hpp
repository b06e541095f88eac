#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>

#include "hood/nn/kernels.hpp"
#include "hood/nn/tensor.hpp"

namespace hood::nn {

enum class Mode { train, eval };

/// Trainable tensor with its accumulated gradient.
template <typename T>
struct Parameter {
  Tensor<T> value;
  Tensor<T> grad;

  explicit Parameter(Shape shape = {}) : value(shape), grad(shape) {}
  void zero_grad() { grad.fill(T{}); }
};

/// Fan-in scaled uniform init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
template <typename T>
void init_uniform(Tensor<T>& t, std::size_t fan_in, std::mt19937_64& rng);

// Each layer caches what its backward pass needs during forward(); infer()
// is the const, cache-free evaluation path. backward() accumulates parameter
// gradients into Parameter::grad and returns the input gradient.

template <typename T>
class Conv2d {
 public:
  Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride,
         std::size_t pad);

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> infer(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& dy);
  void init(std::mt19937_64& rng);

  Parameter<T> weight;  // [out_c, in_c, k, k]
  Parameter<T> bias;    // [out_c]

 private:
  ConvGeometry geometry(const Tensor<T>& x) const;
  std::size_t in_channels_, out_channels_, kernel_, stride_, pad_;
  Tensor<T> input_;
};

template <typename T>
class ConvTranspose2d {
 public:
  ConvTranspose2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride,
                  std::size_t pad, std::size_t output_padding);

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> infer(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& dy);
  void init(std::mt19937_64& rng);

  Parameter<T> weight;  // [in_c, out_c, k, k]
  Parameter<T> bias;    // [out_c]

 private:
  ConvGeometry geometry(const Tensor<T>& x) const;
  std::size_t in_channels_, out_channels_, kernel_, stride_, pad_, output_padding_;
  Tensor<T> input_;
};

/// Batch normalization over [N, C] (1-D) or [N, C, H, W] (2-D) inputs.
/// Training uses biased batch statistics and folds the unbiased variance into
/// the running estimate with `momentum`.
template <typename T>
class BatchNorm {
 public:
  explicit BatchNorm(std::size_t channels, double momentum = 0.1, double eps = 1e-5);

  Tensor<T> forward(const Tensor<T>& x, Mode mode);
  Tensor<T> infer(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& dy);

  std::size_t channels() const { return channels_; }

  Parameter<T> gamma;
  Parameter<T> beta;
  Tensor<T> running_mean;
  Tensor<T> running_var;

 private:
  std::size_t channels_;
  double momentum_;
  double eps_;
  Mode cached_mode_ = Mode::train;
  Tensor<T> normalized_;
  std::vector<T> inv_std_;
};

template <typename T>
class Dense {
 public:
  Dense(std::size_t in, std::size_t out);

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> infer(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& dy);
  void init(std::mt19937_64& rng);

  Parameter<T> weight;  // [out, in]
  Parameter<T> bias;    // [out]

 private:
  std::size_t in_, out_;
  Tensor<T> input_;
};

inline constexpr double kLeakySlope = 0.01;

template <typename T>
class LeakyRelu {
 public:
  explicit LeakyRelu(T slope = static_cast<T>(kLeakySlope)) : slope_(slope) {}
  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> infer(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& dy) const;

 private:
  T slope_;
  Tensor<T> input_;
};

template <typename T>
class Sigmoid {
 public:
  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> infer(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& dy) const;

 private:
  Tensor<T> output_;
};

/// [N, ...] -> [N, prod(...)].
template <typename T>
Tensor<T> flatten(const Tensor<T>& x) {
  return x.reshaped({x.dim(0), x.size() / std::max<std::size_t>(x.dim(0), 1)});
}

template <typename T>
Tensor<T> unflatten(const Tensor<T>& x, const Shape& item_shape) {
  Shape s{x.dim(0)};
  s.insert(s.end(), item_shape.begin(), item_shape.end());
  return x.reshaped(std::move(s));
}

/// Mean of squared element differences.
template <typename T>
T mse(const Tensor<T>& prediction, const Tensor<T>& target);

/// d mse / d prediction = 2 (prediction - target) / size.
template <typename T>
Tensor<T> mse_backward(const Tensor<T>& prediction, const Tensor<T>& target);

/// Per-item MSE along the leading axis.
template <typename T>
std::vector<T> mse_per_item(const Tensor<T>& prediction, const Tensor<T>& target);

}  // namespace hood::nn
