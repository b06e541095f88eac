#include "hood/nn/layers.hpp"

#include <cmath>
#include <sstream>

namespace hood::nn {

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

namespace {

template <typename T>
void add_into(Tensor<T>& dst, const std::vector<T>& src) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

void require_rank(const Shape& shape, std::size_t rank, const char* layer) {
  if (shape.size() != rank) {
    throw ShapeError(std::string(layer) + ": expected rank-" + std::to_string(rank) + " input, got " +
                     shape_string(shape));
  }
}

}  // namespace

template <typename T>
void init_uniform(Tensor<T>& t, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : t.values()) v = static_cast<T>(dist(rng));
}

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride,
                  std::size_t pad)
    : weight({out_channels, in_channels, kernel, kernel}),
      bias({out_channels}),
      in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel),
      stride_(stride),
      pad_(pad) {}

template <typename T>
void Conv2d<T>::init(std::mt19937_64& rng) {
  const std::size_t fan_in = in_channels_ * kernel_ * kernel_;
  init_uniform(weight.value, fan_in, rng);
  init_uniform(bias.value, fan_in, rng);
}

template <typename T>
ConvGeometry Conv2d<T>::geometry(const Tensor<T>& x) const {
  require_rank(x.shape(), 4, "conv2d");
  if (x.dim(1) != in_channels_) {
    throw ShapeError("conv2d: expected " + std::to_string(in_channels_) + " input channels, got " +
                     shape_string(x.shape()));
  }
  if (x.dim(2) + 2 * pad_ < kernel_ || x.dim(3) + 2 * pad_ < kernel_) {
    throw ShapeError("conv2d: input " + shape_string(x.shape()) + " smaller than the kernel");
  }
  ConvGeometry g;
  g.batch = x.dim(0);
  g.in_channels = in_channels_;
  g.out_channels = out_channels_;
  g.in_h = x.dim(2);
  g.in_w = x.dim(3);
  g.kernel = kernel_;
  g.stride = stride_;
  g.pad = pad_;
  return g;
}

template <typename T>
Tensor<T> Conv2d<T>::infer(const Tensor<T>& x) const {
  const auto g = geometry(x);
  Tensor<T> y({g.batch, out_channels_, g.conv_out_h(), g.conv_out_w()});
  parallel::conv2d_forward(g, x.data(), weight.value.data(), bias.value.data(), y.data());
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) {
  auto y = infer(x);
  input_ = x;
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy) {
  const auto g = geometry(input_);
  require_shape(dy, {g.batch, out_channels_, g.conv_out_h(), g.conv_out_w()}, "conv2d backward");
  Tensor<T> dx(input_.shape());
  std::vector<T> dw(weight.value.size());
  std::vector<T> db(bias.value.size());
  parallel::conv2d_backward(g, input_.data(), weight.value.data(), dy.data(), dx.data(), dw.data(), db.data());
  add_into(weight.grad, dw);
  add_into(bias.grad, db);
  return dx;
}

// ------------------------------------------------------- ConvTranspose2d

template <typename T>
ConvTranspose2d<T>::ConvTranspose2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
                                    std::size_t stride, std::size_t pad, std::size_t output_padding)
    : weight({in_channels, out_channels, kernel, kernel}),
      bias({out_channels}),
      in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel),
      stride_(stride),
      pad_(pad),
      output_padding_(output_padding) {
  if (output_padding_ >= stride_ && output_padding_ > 0) {
    throw ShapeError("conv_transpose2d: output_padding must be smaller than stride");
  }
}

template <typename T>
void ConvTranspose2d<T>::init(std::mt19937_64& rng) {
  const std::size_t fan_in = out_channels_ * kernel_ * kernel_;
  init_uniform(weight.value, fan_in, rng);
  init_uniform(bias.value, fan_in, rng);
}

template <typename T>
ConvGeometry ConvTranspose2d<T>::geometry(const Tensor<T>& x) const {
  require_rank(x.shape(), 4, "conv_transpose2d");
  if (x.dim(1) != in_channels_) {
    throw ShapeError("conv_transpose2d: expected " + std::to_string(in_channels_) + " input channels, got " +
                     shape_string(x.shape()));
  }
  ConvGeometry g;
  g.batch = x.dim(0);
  g.in_channels = in_channels_;
  g.out_channels = out_channels_;
  g.in_h = x.dim(2);
  g.in_w = x.dim(3);
  g.kernel = kernel_;
  g.stride = stride_;
  g.pad = pad_;
  g.output_padding = output_padding_;
  if ((g.in_h - 1) * stride_ + kernel_ + output_padding_ <= 2 * pad_) {
    throw ShapeError("conv_transpose2d: padding consumes the whole output");
  }
  return g;
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::infer(const Tensor<T>& x) const {
  const auto g = geometry(x);
  Tensor<T> y({g.batch, out_channels_, g.transpose_out_h(), g.transpose_out_w()});
  parallel::conv_transpose2d_forward(g, x.data(), weight.value.data(), bias.value.data(), y.data());
  return y;
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::forward(const Tensor<T>& x) {
  auto y = infer(x);
  input_ = x;
  return y;
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::backward(const Tensor<T>& dy) {
  const auto g = geometry(input_);
  require_shape(dy, {g.batch, out_channels_, g.transpose_out_h(), g.transpose_out_w()}, "conv_transpose2d backward");
  Tensor<T> dx(input_.shape());
  std::vector<T> dw(weight.value.size());
  std::vector<T> db(bias.value.size());
  parallel::conv_transpose2d_backward(g, input_.data(), weight.value.data(), dy.data(), dx.data(), dw.data(),
                                      db.data());
  add_into(weight.grad, dw);
  add_into(bias.grad, db);
  return dx;
}

// ------------------------------------------------------------- BatchNorm

template <typename T>
BatchNorm<T>::BatchNorm(std::size_t channels, double momentum, double eps)
    : gamma({channels}),
      beta({channels}),
      running_mean({channels}, T{0}),
      running_var({channels}, T{1}),
      channels_(channels),
      momentum_(momentum),
      eps_(eps) {
  gamma.value.fill(T{1});
}

namespace {

// Layout helper: element (n, c, p) of an [N, C] or [N, C, ...] tensor.
struct ChannelLayout {
  std::size_t batch, channels, plane;
  std::size_t index(std::size_t n, std::size_t c, std::size_t p) const { return (n * channels + c) * plane + p; }
  std::size_t count() const { return batch * plane; }
};

template <typename T>
ChannelLayout channel_layout(const Tensor<T>& x, std::size_t channels) {
  if (x.rank() != 2 && x.rank() != 4) {
    throw ShapeError("batchnorm: expected [N, C] or [N, C, H, W], got " + shape_string(x.shape()));
  }
  if (x.dim(1) != channels) {
    throw ShapeError("batchnorm: expected " + std::to_string(channels) + " channels, got " + shape_string(x.shape()));
  }
  const std::size_t plane = x.rank() == 4 ? x.dim(2) * x.dim(3) : 1;
  return {x.dim(0), channels, plane};
}

}  // namespace

template <typename T>
Tensor<T> BatchNorm<T>::infer(const Tensor<T>& x) const {
  const auto layout = channel_layout(x, channels_);
  Tensor<T> y(x.shape());
  for (std::size_t c = 0; c < channels_; ++c) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(running_var[c]) + eps_);
    const double scale = static_cast<double>(gamma.value[c]) * inv;
    const double shift = static_cast<double>(beta.value[c]) - static_cast<double>(running_mean[c]) * scale;
    for (std::size_t n = 0; n < layout.batch; ++n) {
      for (std::size_t p = 0; p < layout.plane; ++p) {
        const auto i = layout.index(n, c, p);
        y[i] = static_cast<T>(static_cast<double>(x[i]) * scale + shift);
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& x, Mode mode) {
  const auto layout = channel_layout(x, channels_);
  cached_mode_ = mode;
  normalized_ = Tensor<T>(x.shape());
  inv_std_.assign(channels_, T{});
  Tensor<T> y(x.shape());
  if (mode == Mode::train && layout.batch < 2) {
    throw ValidationError("batchnorm: training mode needs a batch of at least 2");
  }
  const double count = static_cast<double>(layout.count());

#pragma omp parallel for schedule(static) if (channels_ >= 16)
  for (std::ptrdiff_t cs = 0; cs < static_cast<std::ptrdiff_t>(channels_); ++cs) {
    const auto c = static_cast<std::size_t>(cs);
    double mean = static_cast<double>(running_mean[c]);
    double var = static_cast<double>(running_var[c]);
    if (mode == Mode::train) {
      mean = 0.0;
      for (std::size_t n = 0; n < layout.batch; ++n) {
        for (std::size_t p = 0; p < layout.plane; ++p) mean += static_cast<double>(x[layout.index(n, c, p)]);
      }
      mean /= count;
      var = 0.0;
      for (std::size_t n = 0; n < layout.batch; ++n) {
        for (std::size_t p = 0; p < layout.plane; ++p) {
          const double d = static_cast<double>(x[layout.index(n, c, p)]) - mean;
          var += d * d;
        }
      }
      var /= count;
      running_mean[c] = static_cast<T>((1.0 - momentum_) * static_cast<double>(running_mean[c]) + momentum_ * mean);
      running_var[c] = static_cast<T>((1.0 - momentum_) * static_cast<double>(running_var[c]) +
                                      momentum_ * var * count / (count - 1.0));
    }
    const double inv = 1.0 / std::sqrt(var + eps_);
    inv_std_[c] = static_cast<T>(inv);
    const double g = static_cast<double>(gamma.value[c]);
    const double b = static_cast<double>(beta.value[c]);
    for (std::size_t n = 0; n < layout.batch; ++n) {
      for (std::size_t p = 0; p < layout.plane; ++p) {
        const auto i = layout.index(n, c, p);
        const double xhat = (static_cast<double>(x[i]) - mean) * inv;
        normalized_[i] = static_cast<T>(xhat);
        y[i] = static_cast<T>(g * xhat + b);
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm<T>::backward(const Tensor<T>& dy) {
  require_shape(dy, normalized_.shape(), "batchnorm backward");
  const auto layout = channel_layout(dy, channels_);
  const double count = static_cast<double>(layout.count());
  Tensor<T> dx(dy.shape());
#pragma omp parallel for schedule(static) if (channels_ >= 16)
  for (std::ptrdiff_t cs = 0; cs < static_cast<std::ptrdiff_t>(channels_); ++cs) {
    const auto c = static_cast<std::size_t>(cs);
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t n = 0; n < layout.batch; ++n) {
      for (std::size_t p = 0; p < layout.plane; ++p) {
        const auto i = layout.index(n, c, p);
        sum_dy += static_cast<double>(dy[i]);
        sum_dy_xhat += static_cast<double>(dy[i]) * static_cast<double>(normalized_[i]);
      }
    }
    gamma.grad[c] += static_cast<T>(sum_dy_xhat);
    beta.grad[c] += static_cast<T>(sum_dy);
    const double g = static_cast<double>(gamma.value[c]);
    const double inv = static_cast<double>(inv_std_[c]);
    for (std::size_t n = 0; n < layout.batch; ++n) {
      for (std::size_t p = 0; p < layout.plane; ++p) {
        const auto i = layout.index(n, c, p);
        if (cached_mode_ == Mode::train) {
          dx[i] = static_cast<T>(g * inv / count *
                                 (count * static_cast<double>(dy[i]) - sum_dy -
                                  static_cast<double>(normalized_[i]) * sum_dy_xhat));
        } else {
          dx[i] = static_cast<T>(g * inv * static_cast<double>(dy[i]));
        }
      }
    }
  }
  return dx;
}

// ----------------------------------------------------------------- Dense

template <typename T>
Dense<T>::Dense(std::size_t in, std::size_t out) : weight({out, in}), bias({out}), in_(in), out_(out) {}

template <typename T>
void Dense<T>::init(std::mt19937_64& rng) {
  init_uniform(weight.value, in_, rng);
  init_uniform(bias.value, in_, rng);
}

template <typename T>
Tensor<T> Dense<T>::infer(const Tensor<T>& x) const {
  require_rank(x.shape(), 2, "dense");
  if (x.dim(1) != in_) {
    throw ShapeError("dense: expected " + std::to_string(in_) + " input features, got " + shape_string(x.shape()));
  }
  DenseGeometry g{x.dim(0), in_, out_};
  Tensor<T> y({g.batch, out_});
  parallel::dense_forward(g, x.data(), weight.value.data(), bias.value.data(), y.data());
  return y;
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x) {
  auto y = infer(x);
  input_ = x;
  return y;
}

template <typename T>
Tensor<T> Dense<T>::backward(const Tensor<T>& dy) {
  DenseGeometry g{input_.dim(0), in_, out_};
  require_shape(dy, {g.batch, out_}, "dense backward");
  Tensor<T> dx(input_.shape());
  std::vector<T> dw(weight.value.size());
  std::vector<T> db(bias.value.size());
  parallel::dense_backward(g, input_.data(), weight.value.data(), dy.data(), dx.data(), dw.data(), db.data());
  add_into(weight.grad, dw);
  add_into(bias.grad, db);
  return dx;
}

// ------------------------------------------------------------ Activations

template <typename T>
Tensor<T> LeakyRelu<T>::infer(const Tensor<T>& x) const {
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T{0} ? x[i] : slope_ * x[i];
  return y;
}

template <typename T>
Tensor<T> LeakyRelu<T>::forward(const Tensor<T>& x) {
  input_ = x;
  return infer(x);
}

template <typename T>
Tensor<T> LeakyRelu<T>::backward(const Tensor<T>& dy) const {
  require_shape(dy, input_.shape(), "leaky_relu backward");
  Tensor<T> dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = input_[i] > T{0} ? dy[i] : slope_ * dy[i];
  return dx;
}

template <typename T>
Tensor<T> Sigmoid<T>::infer(const Tensor<T>& x) const {
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = T{1} / (T{1} + std::exp(-x[i]));
  return y;
}

template <typename T>
Tensor<T> Sigmoid<T>::forward(const Tensor<T>& x) {
  output_ = infer(x);
  return output_;
}

template <typename T>
Tensor<T> Sigmoid<T>::backward(const Tensor<T>& dy) const {
  require_shape(dy, output_.shape(), "sigmoid backward");
  Tensor<T> dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * output_[i] * (T{1} - output_[i]);
  return dx;
}

// ------------------------------------------------------------------- MSE

template <typename T>
T mse(const Tensor<T>& prediction, const Tensor<T>& target) {
  require_shape(target, prediction.shape(), "mse");
  if (prediction.empty()) return T{};
  double acc = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double d = static_cast<double>(prediction[i]) - static_cast<double>(target[i]);
    acc += d * d;
  }
  return static_cast<T>(acc / static_cast<double>(prediction.size()));
}

template <typename T>
Tensor<T> mse_backward(const Tensor<T>& prediction, const Tensor<T>& target) {
  require_shape(target, prediction.shape(), "mse backward");
  Tensor<T> grad(prediction.shape());
  const T scale = T{2} / static_cast<T>(std::max<std::size_t>(prediction.size(), 1));
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = scale * (prediction[i] - target[i]);
  return grad;
}

template <typename T>
std::vector<T> mse_per_item(const Tensor<T>& prediction, const Tensor<T>& target) {
  require_shape(target, prediction.shape(), "mse");
  const std::size_t items = prediction.rank() == 0 ? 0 : prediction.dim(0);
  const std::size_t row = prediction.row_size();
  std::vector<T> out(items);
  for (std::size_t n = 0; n < items; ++n) {
    double acc = 0.0;
    for (std::size_t i = n * row; i < (n + 1) * row; ++i) {
      const double d = static_cast<double>(prediction[i]) - static_cast<double>(target[i]);
      acc += d * d;
    }
    out[n] = static_cast<T>(acc / static_cast<double>(std::max<std::size_t>(row, 1)));
  }
  return out;
}

#define HOOD_INSTANTIATE_LAYERS(T)                                                          \
  template void init_uniform<T>(Tensor<T>&, std::size_t, std::mt19937_64&);                \
  template class Conv2d<T>;                                                                 \
  template class ConvTranspose2d<T>;                                                        \
  template class BatchNorm<T>;                                                              \
  template class Dense<T>;                                                                  \
  template class LeakyRelu<T>;                                                              \
  template class Sigmoid<T>;                                                                \
  template T mse<T>(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> mse_backward<T>(const Tensor<T>&, const Tensor<T>&);                   \
  template std::vector<T> mse_per_item<T>(const Tensor<T>&, const Tensor<T>&);

HOOD_INSTANTIATE_LAYERS(float)
HOOD_INSTANTIATE_LAYERS(double)

#undef HOOD_INSTANTIATE_LAYERS

}  // namespace hood::nn
