#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hood/nn/layers.hpp"
#include "hood/nn/tensor.hpp"

namespace hood::nn {

struct AdamaxConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// First moment and exponentially weighted infinity norm for one parameter.
template <typename T>
struct AdamaxSlot {
  Tensor<T> m;
  Tensor<T> u;
};

/// One Adamax update of `params` for step number `step` (1-based):
///   m <- b1 m + (1 - b1) g
///   u <- max(b2 u, |g|)
///   p <- p - lr / (1 - b1^step) * m / (u + eps)
template <typename T>
void adamax_update(const AdamaxConfig& config, std::uint64_t step, AdamaxSlot<T>& slot, std::span<T> params,
                   std::span<const T> grads);

/// Optimizer over a fixed, ordered list of parameters.
template <typename T>
class Adamax {
 public:
  explicit Adamax(AdamaxConfig config = {}) : config_(config) { config_.validate(); }

  /// Binds the parameter list; slot order follows it.
  void attach(std::vector<Parameter<T>*> params);
  void step();

  const AdamaxConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  std::uint64_t steps_taken() const { return step_; }
  void set_steps_taken(std::uint64_t t) { step_ = t; }
  std::vector<AdamaxSlot<T>>& slots() { return slots_; }
  const std::vector<AdamaxSlot<T>>& slots() const { return slots_; }

 private:
  AdamaxConfig config_;
  std::uint64_t step_ = 0;
  std::vector<Parameter<T>*> params_;
  std::vector<AdamaxSlot<T>> slots_;
};

}  // namespace hood::nn
