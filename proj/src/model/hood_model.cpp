#include "hood/model/hood_model.hpp"

#include <string>

namespace hood::model {

void ModelConfig::validate() const {
  if (image_size < 4 || image_size % 4 != 0) {
    throw ValidationError("model: image size must be a positive multiple of 4, got " + std::to_string(image_size));
  }
  if (latent_dim < 1) throw ValidationError("model: latent_dim must be >= 1");
}

// ---------------------------------------------------------------- Encoder

template <typename T>
Encoder<T>::Encoder(const ModelConfig& config)
    : config_(config),
      conv1_(1, 16, 3, 2, 1),
      bn1_(16),
      conv2_(16, 64, 3, 2, 1),
      bn2_(64),
      dense_(config.flat_features(), config.latent_dim),
      bn3_(config.latent_dim),
      feature_shape_{64, config.bottleneck_side(), config.bottleneck_side()} {}

template <typename T>
Tensor<T> Encoder<T>::forward(const Tensor<T>& x, Mode mode) {
  require_shape(x, {x.rank() ? x.dim(0) : 0, 1, config_.image_size, config_.image_size}, "encoder");
  auto h = act1_.forward(bn1_.forward(conv1_.forward(x), mode));
  h = act2_.forward(bn2_.forward(conv2_.forward(h), mode));
  return bn3_.forward(dense_.forward(nn::flatten(h)), mode);
}

template <typename T>
Tensor<T> Encoder<T>::infer(const Tensor<T>& x) const {
  require_shape(x, {x.rank() ? x.dim(0) : 0, 1, config_.image_size, config_.image_size}, "encoder");
  auto h = act1_.infer(bn1_.infer(conv1_.infer(x)));
  h = act2_.infer(bn2_.infer(conv2_.infer(h)));
  return bn3_.infer(dense_.infer(nn::flatten(h)));
}

template <typename T>
Tensor<T> Encoder<T>::backward(const Tensor<T>& d_latent) {
  auto d = dense_.backward(bn3_.backward(d_latent));
  d = nn::unflatten(d, feature_shape_);
  d = conv2_.backward(bn2_.backward(act2_.backward(d)));
  return conv1_.backward(bn1_.backward(act1_.backward(d)));
}

template <typename T>
void Encoder<T>::init(std::mt19937_64& rng) {
  conv1_.init(rng);
  conv2_.init(rng);
  dense_.init(rng);
}

template <typename T>
void Encoder<T>::visit_parameters(const std::string& prefix,
                                  const std::function<void(const std::string&, Parameter<T>&)>& f) {
  f(prefix + ".conv1.weight", conv1_.weight);
  f(prefix + ".conv1.bias", conv1_.bias);
  f(prefix + ".bn1.gamma", bn1_.gamma);
  f(prefix + ".bn1.beta", bn1_.beta);
  f(prefix + ".conv2.weight", conv2_.weight);
  f(prefix + ".conv2.bias", conv2_.bias);
  f(prefix + ".bn2.gamma", bn2_.gamma);
  f(prefix + ".bn2.beta", bn2_.beta);
  f(prefix + ".dense.weight", dense_.weight);
  f(prefix + ".dense.bias", dense_.bias);
  f(prefix + ".bn3.gamma", bn3_.gamma);
  f(prefix + ".bn3.beta", bn3_.beta);
}

template <typename T>
void Encoder<T>::visit_buffers(const std::string& prefix,
                               const std::function<void(const std::string&, Tensor<T>&)>& f) {
  f(prefix + ".bn1.running_mean", bn1_.running_mean);
  f(prefix + ".bn1.running_var", bn1_.running_var);
  f(prefix + ".bn2.running_mean", bn2_.running_mean);
  f(prefix + ".bn2.running_var", bn2_.running_var);
  f(prefix + ".bn3.running_mean", bn3_.running_mean);
  f(prefix + ".bn3.running_var", bn3_.running_var);
}

// ---------------------------------------------------------------- Decoder

template <typename T>
Decoder<T>::Decoder(const ModelConfig& config)
    : config_(config),
      dense_(config.latent_dim, config.flat_features()),
      bn0_(config.flat_features()),
      up1_(64, 64, 3, 2, 1, 1),
      bn1_(64),
      up2_(64, 16, 3, 2, 1, 1),
      bn2_(16),
      out_conv_(16, 1, 3, 1, 1) {}

template <typename T>
Tensor<T> Decoder<T>::forward(const Tensor<T>& latent, Mode mode) {
  const Shape item{64, config_.bottleneck_side(), config_.bottleneck_side()};
  auto h = nn::unflatten(bn0_.forward(dense_.forward(latent), mode), item);
  h = act1_.forward(bn1_.forward(up1_.forward(h), mode));
  h = act2_.forward(bn2_.forward(up2_.forward(h), mode));
  return out_act_.forward(out_conv_.forward(h));
}

template <typename T>
Tensor<T> Decoder<T>::infer(const Tensor<T>& latent) const {
  const Shape item{64, config_.bottleneck_side(), config_.bottleneck_side()};
  auto h = nn::unflatten(bn0_.infer(dense_.infer(latent)), item);
  h = act1_.infer(bn1_.infer(up1_.infer(h)));
  h = act2_.infer(bn2_.infer(up2_.infer(h)));
  return out_act_.infer(out_conv_.infer(h));
}

template <typename T>
Tensor<T> Decoder<T>::backward(const Tensor<T>& d_output) {
  auto d = out_conv_.backward(out_act_.backward(d_output));
  d = up2_.backward(bn2_.backward(act2_.backward(d)));
  d = up1_.backward(bn1_.backward(act1_.backward(d)));
  return dense_.backward(bn0_.backward(nn::flatten(d)));
}

template <typename T>
void Decoder<T>::init(std::mt19937_64& rng) {
  dense_.init(rng);
  up1_.init(rng);
  up2_.init(rng);
  out_conv_.init(rng);
}

template <typename T>
void Decoder<T>::visit_parameters(const std::string& prefix,
                                  const std::function<void(const std::string&, Parameter<T>&)>& f) {
  f(prefix + ".dense.weight", dense_.weight);
  f(prefix + ".dense.bias", dense_.bias);
  f(prefix + ".bn0.gamma", bn0_.gamma);
  f(prefix + ".bn0.beta", bn0_.beta);
  f(prefix + ".up1.weight", up1_.weight);
  f(prefix + ".up1.bias", up1_.bias);
  f(prefix + ".bn1.gamma", bn1_.gamma);
  f(prefix + ".bn1.beta", bn1_.beta);
  f(prefix + ".up2.weight", up2_.weight);
  f(prefix + ".up2.bias", up2_.bias);
  f(prefix + ".bn2.gamma", bn2_.gamma);
  f(prefix + ".bn2.beta", bn2_.beta);
  f(prefix + ".out.weight", out_conv_.weight);
  f(prefix + ".out.bias", out_conv_.bias);
}

template <typename T>
void Decoder<T>::visit_buffers(const std::string& prefix,
                               const std::function<void(const std::string&, Tensor<T>&)>& f) {
  f(prefix + ".bn0.running_mean", bn0_.running_mean);
  f(prefix + ".bn0.running_var", bn0_.running_var);
  f(prefix + ".bn1.running_mean", bn1_.running_mean);
  f(prefix + ".bn1.running_var", bn1_.running_var);
  f(prefix + ".bn2.running_mean", bn2_.running_mean);
  f(prefix + ".bn2.running_var", bn2_.running_var);
}

// -------------------------------------------------------------- HoodModel

template <typename T>
HoodModel<T>::HoodModel(const ModelConfig& config) : config_(config) {
  config_.validate();
  for (std::size_t i = 0; i < 2; ++i) encoders_.emplace_back(config_);
  for (std::size_t i = 0; i < 4; ++i) decoders_.emplace_back(config_);
}

template <typename T>
Tensor<T> HoodModel<T>::reconstruct(Branch b, Activity a, const Tensor<T>& x) const {
  return decoder(b, a).infer(encoder(b).infer(x));
}

template <typename T>
std::string HoodModel<T>::network_name(Branch b) {
  return b == Branch::macro ? "enc_macro" : "enc_micro";
}

template <typename T>
std::string HoodModel<T>::network_name(Branch b, Activity a) {
  return std::string(b == Branch::macro ? "dec_macro" : "dec_micro") +
         (a == Activity::static_activity ? "_s" : "_vs");
}

template <typename T>
void HoodModel<T>::visit_parameters(const std::function<void(const std::string&, Parameter<T>&)>& f) {
  for (auto b : kBranches) encoder(b).visit_parameters(network_name(b), f);
  for (auto b : kBranches) {
    for (auto a : kActivities) decoder(b, a).visit_parameters(network_name(b, a), f);
  }
}

template <typename T>
void HoodModel<T>::visit_buffers(const std::function<void(const std::string&, Tensor<T>&)>& f) {
  for (auto b : kBranches) encoder(b).visit_buffers(network_name(b), f);
  for (auto b : kBranches) {
    for (auto a : kActivities) decoder(b, a).visit_buffers(network_name(b, a), f);
  }
}

template <typename T>
std::vector<Parameter<T>*> HoodModel<T>::parameters() {
  std::vector<Parameter<T>*> out;
  visit_parameters([&](const std::string&, Parameter<T>& p) { out.push_back(&p); });
  return out;
}

template <typename T>
void HoodModel<T>::zero_grad() {
  visit_parameters([](const std::string&, Parameter<T>& p) { p.zero_grad(); });
}

template <typename T>
HoodModel<T> build_model(const ModelConfig& config, std::uint64_t seed) {
  HoodModel<T> model(config);
  std::mt19937_64 rng(seed);
  for (auto b : kBranches) model.encoder(b).init(rng);
  for (auto b : kBranches) {
    for (auto a : kActivities) model.decoder(b, a).init(rng);
  }
  return model;
}

template <typename To, typename From>
HoodModel<To> convert_model(HoodModel<From>& source) {
  HoodModel<To> out(source.config());
  std::vector<const Tensor<From>*> params;
  std::vector<const Tensor<From>*> buffers;
  source.visit_parameters([&](const std::string&, Parameter<From>& p) { params.push_back(&p.value); });
  source.visit_buffers([&](const std::string&, Tensor<From>& t) { buffers.push_back(&t); });
  std::size_t i = 0;
  out.visit_parameters([&](const std::string&, Parameter<To>& p) { p.value = nn::tensor_cast<To>(*params[i++]); });
  i = 0;
  out.visit_buffers([&](const std::string&, Tensor<To>& t) { t = nn::tensor_cast<To>(*buffers[i++]); });
  return out;
}

template class Encoder<float>;
template class Encoder<double>;
template class Decoder<float>;
template class Decoder<double>;
template class HoodModel<float>;
template class HoodModel<double>;
template HoodModel<float> build_model<float>(const ModelConfig&, std::uint64_t);
template HoodModel<double> build_model<double>(const ModelConfig&, std::uint64_t);
template HoodModel<double> convert_model<double, float>(HoodModel<float>&);
template HoodModel<float> convert_model<float, double>(HoodModel<double>&);
template HoodModel<float> convert_model<float, float>(HoodModel<float>&);

}  // namespace hood::model
