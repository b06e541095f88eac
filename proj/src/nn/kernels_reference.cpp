#include <algorithm>
#include <cstddef>

#include "hood/nn/kernels.hpp"

namespace hood::nn::reference {

namespace {

template <typename T>
void conv_fwd(const ConvGeometry& g, const T* x, const T* w, const T* b, T* y) {
  const std::size_t oh = g.conv_out_h(), ow = g.conv_out_w();
  const std::size_t k = g.kernel;
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t co = 0; co < g.out_channels; ++co) {
      for (std::size_t i = 0; i < oh; ++i) {
        for (std::size_t j = 0; j < ow; ++j) {
          T acc = b ? b[co] : T{};
          for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
            for (std::size_t kh = 0; kh < k; ++kh) {
              const auto r = static_cast<std::ptrdiff_t>(i * g.stride + kh) - static_cast<std::ptrdiff_t>(g.pad);
              if (r < 0 || r >= static_cast<std::ptrdiff_t>(g.in_h)) continue;
              for (std::size_t kw = 0; kw < k; ++kw) {
                const auto c =
                    static_cast<std::ptrdiff_t>(j * g.stride + kw) - static_cast<std::ptrdiff_t>(g.pad);
                if (c < 0 || c >= static_cast<std::ptrdiff_t>(g.in_w)) continue;
                acc += w[((co * g.in_channels + ci) * k + kh) * k + kw] *
                       x[((n * g.in_channels + ci) * g.in_h + static_cast<std::size_t>(r)) * g.in_w +
                         static_cast<std::size_t>(c)];
              }
            }
          }
          y[((n * g.out_channels + co) * oh + i) * ow + j] = acc;
        }
      }
    }
  }
}

template <typename T>
void conv_bwd(const ConvGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, T* db) {
  const std::size_t oh = g.conv_out_h(), ow = g.conv_out_w();
  const std::size_t k = g.kernel;
  if (dx) std::fill_n(dx, g.batch * g.in_channels * g.in_h * g.in_w, T{});
  if (dw) std::fill_n(dw, g.out_channels * g.in_channels * k * k, T{});
  if (db) std::fill_n(db, g.out_channels, T{});
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t co = 0; co < g.out_channels; ++co) {
      for (std::size_t i = 0; i < oh; ++i) {
        for (std::size_t j = 0; j < ow; ++j) {
          const T grad = dy[((n * g.out_channels + co) * oh + i) * ow + j];
          if (db) db[co] += grad;
          for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
            for (std::size_t kh = 0; kh < k; ++kh) {
              const auto r = static_cast<std::ptrdiff_t>(i * g.stride + kh) - static_cast<std::ptrdiff_t>(g.pad);
              if (r < 0 || r >= static_cast<std::ptrdiff_t>(g.in_h)) continue;
              for (std::size_t kw = 0; kw < k; ++kw) {
                const auto c =
                    static_cast<std::ptrdiff_t>(j * g.stride + kw) - static_cast<std::ptrdiff_t>(g.pad);
                if (c < 0 || c >= static_cast<std::ptrdiff_t>(g.in_w)) continue;
                const std::size_t xi = ((n * g.in_channels + ci) * g.in_h + static_cast<std::size_t>(r)) * g.in_w +
                                       static_cast<std::size_t>(c);
                const std::size_t wi = ((co * g.in_channels + ci) * k + kh) * k + kw;
                if (dw) dw[wi] += grad * x[xi];
                if (dx) dx[xi] += grad * w[wi];
              }
            }
          }
        }
      }
    }
  }
}

// Transposed convolution as a scatter: every input pixel stamps the kernel
// onto the output at stride spacing.
template <typename T>
void convt_fwd(const ConvGeometry& g, const T* x, const T* w, const T* b, T* y) {
  const std::size_t oh = g.transpose_out_h(), ow = g.transpose_out_w();
  const std::size_t k = g.kernel;
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t co = 0; co < g.out_channels; ++co) {
      T* plane = y + (n * g.out_channels + co) * oh * ow;
      std::fill_n(plane, oh * ow, b ? b[co] : T{});
    }
    for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
      for (std::size_t i = 0; i < g.in_h; ++i) {
        for (std::size_t j = 0; j < g.in_w; ++j) {
          const T v = x[((n * g.in_channels + ci) * g.in_h + i) * g.in_w + j];
          for (std::size_t co = 0; co < g.out_channels; ++co) {
            for (std::size_t kh = 0; kh < k; ++kh) {
              const auto r = static_cast<std::ptrdiff_t>(i * g.stride + kh) - static_cast<std::ptrdiff_t>(g.pad);
              if (r < 0 || r >= static_cast<std::ptrdiff_t>(oh)) continue;
              for (std::size_t kw = 0; kw < k; ++kw) {
                const auto c =
                    static_cast<std::ptrdiff_t>(j * g.stride + kw) - static_cast<std::ptrdiff_t>(g.pad);
                if (c < 0 || c >= static_cast<std::ptrdiff_t>(ow)) continue;
                y[((n * g.out_channels + co) * oh + static_cast<std::size_t>(r)) * ow + static_cast<std::size_t>(c)] +=
                    v * w[((ci * g.out_channels + co) * k + kh) * k + kw];
              }
            }
          }
        }
      }
    }
  }
}

template <typename T>
void convt_bwd(const ConvGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, T* db) {
  const std::size_t oh = g.transpose_out_h(), ow = g.transpose_out_w();
  const std::size_t k = g.kernel;
  if (dx) std::fill_n(dx, g.batch * g.in_channels * g.in_h * g.in_w, T{});
  if (dw) std::fill_n(dw, g.in_channels * g.out_channels * k * k, T{});
  if (db) {
    std::fill_n(db, g.out_channels, T{});
    for (std::size_t n = 0; n < g.batch; ++n) {
      for (std::size_t co = 0; co < g.out_channels; ++co) {
        const T* plane = dy + (n * g.out_channels + co) * oh * ow;
        for (std::size_t p = 0; p < oh * ow; ++p) db[co] += plane[p];
      }
    }
  }
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
      for (std::size_t i = 0; i < g.in_h; ++i) {
        for (std::size_t j = 0; j < g.in_w; ++j) {
          const std::size_t xi = ((n * g.in_channels + ci) * g.in_h + i) * g.in_w + j;
          for (std::size_t co = 0; co < g.out_channels; ++co) {
            for (std::size_t kh = 0; kh < k; ++kh) {
              const auto r = static_cast<std::ptrdiff_t>(i * g.stride + kh) - static_cast<std::ptrdiff_t>(g.pad);
              if (r < 0 || r >= static_cast<std::ptrdiff_t>(oh)) continue;
              for (std::size_t kw = 0; kw < k; ++kw) {
                const auto c =
                    static_cast<std::ptrdiff_t>(j * g.stride + kw) - static_cast<std::ptrdiff_t>(g.pad);
                if (c < 0 || c >= static_cast<std::ptrdiff_t>(ow)) continue;
                const T grad =
                    dy[((n * g.out_channels + co) * oh + static_cast<std::size_t>(r)) * ow + static_cast<std::size_t>(c)];
                const std::size_t wi = ((ci * g.out_channels + co) * k + kh) * k + kw;
                if (dx) dx[xi] += grad * w[wi];
                if (dw) dw[wi] += grad * x[xi];
              }
            }
          }
        }
      }
    }
  }
}

template <typename T>
void dense_fwd(const DenseGeometry& g, const T* x, const T* w, const T* b, T* y) {
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t o = 0; o < g.out; ++o) {
      T acc = b ? b[o] : T{};
      for (std::size_t i = 0; i < g.in; ++i) acc += w[o * g.in + i] * x[n * g.in + i];
      y[n * g.out + o] = acc;
    }
  }
}

template <typename T>
void dense_bwd(const DenseGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, T* db) {
  if (dx) std::fill_n(dx, g.batch * g.in, T{});
  if (dw) std::fill_n(dw, g.out * g.in, T{});
  if (db) std::fill_n(db, g.out, T{});
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t o = 0; o < g.out; ++o) {
      const T grad = dy[n * g.out + o];
      if (db) db[o] += grad;
      for (std::size_t i = 0; i < g.in; ++i) {
        if (dw) dw[o * g.in + i] += grad * x[n * g.in + i];
        if (dx) dx[n * g.in + i] += grad * w[o * g.in + i];
      }
    }
  }
}

}  // namespace

#define HOOD_DEFINE_REFERENCE(T)                                                                              \
  void conv2d_forward(const ConvGeometry& g, const T* x, const T* w, const T* b, T* y) {                     \
    conv_fwd(g, x, w, b, y);                                                                                  \
  }                                                                                                           \
  void conv2d_backward(const ConvGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, T* db) {    \
    conv_bwd(g, x, w, dy, dx, dw, db);                                                                        \
  }                                                                                                           \
  void conv_transpose2d_forward(const ConvGeometry& g, const T* x, const T* w, const T* b, T* y) {           \
    convt_fwd(g, x, w, b, y);                                                                                 \
  }                                                                                                           \
  void conv_transpose2d_backward(const ConvGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw,   \
                                 T* db) {                                                                     \
    convt_bwd(g, x, w, dy, dx, dw, db);                                                                       \
  }                                                                                                           \
  void dense_forward(const DenseGeometry& g, const T* x, const T* w, const T* b, T* y) {                     \
    dense_fwd(g, x, w, b, y);                                                                                 \
  }                                                                                                           \
  void dense_backward(const DenseGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, T* db) {    \
    dense_bwd(g, x, w, dy, dx, dw, db);                                                                       \
  }

HOOD_DEFINE_REFERENCE(float)
HOOD_DEFINE_REFERENCE(double)

#undef HOOD_DEFINE_REFERENCE

}  // namespace hood::nn::reference
