#include "hood/nn/adamax.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hood::nn {

void AdamaxConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ValidationError("adamax: learning rate must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ValidationError("adamax: betas must lie in [0, 1)");
  }
  if (!(epsilon >= 0.0)) throw ValidationError("adamax: epsilon must be >= 0");
}

template <typename T>
void adamax_update(const AdamaxConfig& config, std::uint64_t step, AdamaxSlot<T>& slot, std::span<T> params,
                   std::span<const T> grads) {
  if (params.size() != grads.size() || slot.m.size() != params.size() || slot.u.size() != params.size()) {
    throw ShapeError("adamax: parameter, gradient and state sizes differ (" + std::to_string(params.size()) + ", " +
                     std::to_string(grads.size()) + ", " + std::to_string(slot.m.size()) + ")");
  }
  if (step == 0) throw ValidationError("adamax: step numbers start at 1");
  const T b1 = static_cast<T>(config.beta1);
  const T b2 = static_cast<T>(config.beta2);
  const T eps = static_cast<T>(config.epsilon);
  const T rate = static_cast<T>(config.learning_rate / (1.0 - std::pow(config.beta1, static_cast<double>(step))));
  T* m = slot.m.data();
  T* u = slot.u.data();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = grads[i];
    m[i] = b1 * m[i] + (T{1} - b1) * g;
    u[i] = std::max(b2 * u[i], std::abs(g));
    const T denom = u[i] + eps;
    // With eps = 0 a parameter that has never seen a gradient has m = u = 0.
    if (denom > T{0}) params[i] -= rate * m[i] / denom;
  }
}

template <typename T>
void Adamax<T>::attach(std::vector<Parameter<T>*> params) {
  params_ = std::move(params);
  slots_.clear();
  slots_.reserve(params_.size());
  for (auto* p : params_) {
    slots_.push_back({Tensor<T>(p->value.shape()), Tensor<T>(p->value.shape())});
  }
  step_ = 0;
}

template <typename T>
void Adamax<T>::step() {
  ++step_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    adamax_update(config_, step_, slots_[i], params_[i]->value.span(),
                  std::span<const T>(params_[i]->grad.span()));
  }
}

template void adamax_update<float>(const AdamaxConfig&, std::uint64_t, AdamaxSlot<float>&, std::span<float>,
                                   std::span<const float>);
template void adamax_update<double>(const AdamaxConfig&, std::uint64_t, AdamaxSlot<double>&, std::span<double>,
                                    std::span<const double>);
template class Adamax<float>;
template class Adamax<double>;

}  // namespace hood::nn
