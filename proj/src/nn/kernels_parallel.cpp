#include <omp.h>

#include <algorithm>
#include <cstddef>
#include <vector>

#include "hood/nn/kernels.hpp"

namespace hood::nn::parallel {

namespace {

constexpr std::size_t kRowBlock = 4;
constexpr std::size_t kDepthBlock = 256;

// Rows [r0, r1) of C += op(A) * B, where a(i, kk) reads op(A). Every C
// element accumulates over kk in increasing order regardless of blocking.
template <typename T, typename AccessA>
void gemm_rows(std::size_t r0, std::size_t r1, std::size_t n, std::size_t k, AccessA a, const T* b, T* c) {
  for (std::size_t k0 = 0; k0 < k; k0 += kDepthBlock) {
    const std::size_t k1 = std::min(k, k0 + kDepthBlock);
    std::size_t i = r0;
    for (; i + kRowBlock <= r1; i += kRowBlock) {
      T* c0 = c + i * n;
      T* c1 = c0 + n;
      T* c2 = c1 + n;
      T* c3 = c2 + n;
      for (std::size_t kk = k0; kk < k1; ++kk) {
        const T a0 = a(i, kk), a1 = a(i + 1, kk), a2 = a(i + 2, kk), a3 = a(i + 3, kk);
        const T* brow = b + kk * n;
#pragma omp simd
        for (std::size_t j = 0; j < n; ++j) {
          const T bj = brow[j];
          c0[j] += a0 * bj;
          c1[j] += a1 * bj;
          c2[j] += a2 * bj;
          c3[j] += a3 * bj;
        }
      }
    }
    for (; i < r1; ++i) {
      T* ci = c + i * n;
      for (std::size_t kk = k0; kk < k1; ++kk) {
        const T av = a(i, kk);
        const T* brow = b + kk * n;
#pragma omp simd
        for (std::size_t j = 0; j < n; ++j) ci[j] += av * brow[j];
      }
    }
  }
}

template <typename T, typename AccessA>
void gemm_dispatch(std::size_t m, std::size_t n, std::size_t k, AccessA a, const T* b, T* c) {
  const std::size_t blocks = (m + kRowBlock - 1) / kRowBlock;
  if (omp_in_parallel() || omp_get_max_threads() == 1 || blocks < 2) {
    gemm_rows(0, m, n, k, a, b, c);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(blocks); ++blk) {
    const std::size_t r0 = static_cast<std::size_t>(blk) * kRowBlock;
    gemm_rows(r0, std::min(m, r0 + kRowBlock), n, k, a, b, c);
  }
}

// col[(c, kh, kw), (oh, ow)] = img[c, oh*s - p + kh, ow*s - p + kw], zero outside.
template <typename T>
void im2col(const T* img, std::size_t channels, std::size_t h, std::size_t w, std::size_t k, std::size_t stride,
            std::size_t pad, std::size_t oh, std::size_t ow, T* col) {
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t kh = 0; kh < k; ++kh) {
      for (std::size_t kw = 0; kw < k; ++kw) {
        T* dst = col + ((c * k + kh) * k + kw) * oh * ow;
        for (std::size_t i = 0; i < oh; ++i) {
          const auto r = static_cast<std::ptrdiff_t>(i * stride + kh) - static_cast<std::ptrdiff_t>(pad);
          T* drow = dst + i * ow;
          if (r < 0 || r >= static_cast<std::ptrdiff_t>(h)) {
            std::fill_n(drow, ow, T{});
            continue;
          }
          const T* srow = img + (c * h + static_cast<std::size_t>(r)) * w;
          for (std::size_t j = 0; j < ow; ++j) {
            const auto cc = static_cast<std::ptrdiff_t>(j * stride + kw) - static_cast<std::ptrdiff_t>(pad);
            drow[j] = (cc < 0 || cc >= static_cast<std::ptrdiff_t>(w)) ? T{} : srow[cc];
          }
        }
      }
    }
  }
}

// Transposed layout of im2col: row[(oh, ow), (c, kh, kw)].
template <typename T>
void im2row(const T* img, std::size_t channels, std::size_t h, std::size_t w, std::size_t k, std::size_t stride,
            std::size_t pad, std::size_t oh, std::size_t ow, T* row) {
  const std::size_t width = channels * k * k;
  for (std::size_t i = 0; i < oh; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      T* dst = row + (i * ow + j) * width;
      for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t kh = 0; kh < k; ++kh) {
          const auto r = static_cast<std::ptrdiff_t>(i * stride + kh) - static_cast<std::ptrdiff_t>(pad);
          for (std::size_t kw = 0; kw < k; ++kw) {
            const auto cc = static_cast<std::ptrdiff_t>(j * stride + kw) - static_cast<std::ptrdiff_t>(pad);
            const bool inside = r >= 0 && r < static_cast<std::ptrdiff_t>(h) && cc >= 0 &&
                                cc < static_cast<std::ptrdiff_t>(w);
            *dst++ = inside ? img[(c * h + static_cast<std::size_t>(r)) * w + static_cast<std::size_t>(cc)] : T{};
          }
        }
      }
    }
  }
}

// Adjoint of im2col: img += scatter(col). Caller zeroes img if needed.
template <typename T>
void col2im(const T* col, std::size_t channels, std::size_t h, std::size_t w, std::size_t k, std::size_t stride,
            std::size_t pad, std::size_t oh, std::size_t ow, T* img) {
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t kh = 0; kh < k; ++kh) {
      for (std::size_t kw = 0; kw < k; ++kw) {
        const T* src = col + ((c * k + kh) * k + kw) * oh * ow;
        for (std::size_t i = 0; i < oh; ++i) {
          const auto r = static_cast<std::ptrdiff_t>(i * stride + kh) - static_cast<std::ptrdiff_t>(pad);
          if (r < 0 || r >= static_cast<std::ptrdiff_t>(h)) continue;
          T* irow = img + (c * h + static_cast<std::size_t>(r)) * w;
          const T* srow = src + i * ow;
          for (std::size_t j = 0; j < ow; ++j) {
            const auto cc = static_cast<std::ptrdiff_t>(j * stride + kw) - static_cast<std::ptrdiff_t>(pad);
            if (cc < 0 || cc >= static_cast<std::ptrdiff_t>(w)) continue;
            irow[cc] += srow[j];
          }
        }
      }
    }
  }
}

// Runs body(n) for every batch item. Items are spread over threads when the
// batch can occupy them; otherwise items run in order and the GEMMs inside
// split their rows instead.
template <typename Body>
void for_each_item(std::size_t batch, Body&& body) {
  if (batch > 1 && omp_get_max_threads() > 1 && !omp_in_parallel()) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(batch); ++n) body(static_cast<std::size_t>(n));
  } else {
    for (std::size_t n = 0; n < batch; ++n) body(n);
  }
}

// dst[i] = sum_n partial[n][i], summed in item order.
template <typename T>
void reduce_items(const std::vector<T>& partial, std::size_t items, std::size_t len, T* dst) {
#pragma omp parallel for schedule(static) if (len > 4096 && !omp_in_parallel())
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(len); ++i) {
    T acc{};
    for (std::size_t n = 0; n < items; ++n) acc += partial[n * len + static_cast<std::size_t>(i)];
    dst[i] = acc;
  }
}

template <typename T>
void channel_sums(const T* dy, std::size_t batch, std::size_t channels, std::size_t plane, T* db) {
  std::fill_n(db, channels, T{});
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const T* p = dy + (n * channels + c) * plane;
      T acc{};
      for (std::size_t i = 0; i < plane; ++i) acc += p[i];
      db[c] += acc;
    }
  }
}

template <typename T>
void conv_fwd(const ConvGeometry& g, const T* x, const T* w, const T* b, T* y) {
  const std::size_t oh = g.conv_out_h(), ow = g.conv_out_w(), plane = oh * ow;
  const std::size_t depth = g.in_channels * g.kernel * g.kernel;
  for_each_item(g.batch, [&](std::size_t n) {
    std::vector<T> col(depth * plane);
    im2col(x + n * g.in_channels * g.in_h * g.in_w, g.in_channels, g.in_h, g.in_w, g.kernel, g.stride, g.pad, oh, ow,
           col.data());
    T* yn = y + n * g.out_channels * plane;
    for (std::size_t co = 0; co < g.out_channels; ++co) std::fill_n(yn + co * plane, plane, b ? b[co] : T{});
    gemm_dispatch(g.out_channels, plane, depth, [w, depth](std::size_t i, std::size_t kk) { return w[i * depth + kk]; },
                  col.data(), yn);
  });
}

template <typename T>
void conv_bwd(const ConvGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, T* db) {
  const std::size_t oh = g.conv_out_h(), ow = g.conv_out_w(), plane = oh * ow;
  const std::size_t depth = g.in_channels * g.kernel * g.kernel;
  const std::size_t wsize = g.out_channels * depth;
  const std::size_t in_size = g.in_channels * g.in_h * g.in_w;
  std::vector<T> partial(dw ? g.batch * wsize : 0);
  for_each_item(g.batch, [&](std::size_t n) {
    const T* dyn = dy + n * g.out_channels * plane;
    if (dw) {
      std::vector<T> rows(plane * depth);
      im2row(x + n * in_size, g.in_channels, g.in_h, g.in_w, g.kernel, g.stride, g.pad, oh, ow, rows.data());
      T* dwn = partial.data() + n * wsize;
      std::fill_n(dwn, wsize, T{});
      gemm_dispatch(g.out_channels, depth, plane,
                    [dyn, plane](std::size_t i, std::size_t kk) { return dyn[i * plane + kk]; }, rows.data(), dwn);
    }
    if (dx) {
      std::vector<T> dcol(depth * plane, T{});
      gemm_dispatch(depth, plane, g.out_channels,
                    [w, depth](std::size_t i, std::size_t kk) { return w[kk * depth + i]; }, dyn, dcol.data());
      T* dxn = dx + n * in_size;
      std::fill_n(dxn, in_size, T{});
      col2im(dcol.data(), g.in_channels, g.in_h, g.in_w, g.kernel, g.stride, g.pad, oh, ow, dxn);
    }
  });
  if (dw) reduce_items(partial, g.batch, wsize, dw);
  if (db) channel_sums(dy, g.batch, g.out_channels, plane, db);
}

template <typename T>
void convt_fwd(const ConvGeometry& g, const T* x, const T* w, const T* b, T* y) {
  const std::size_t oh = g.transpose_out_h(), ow = g.transpose_out_w(), out_plane = oh * ow;
  const std::size_t in_plane = g.in_h * g.in_w;
  const std::size_t depth = g.out_channels * g.kernel * g.kernel;
  for_each_item(g.batch, [&](std::size_t n) {
    std::vector<T> col(depth * in_plane, T{});
    gemm_dispatch(depth, in_plane, g.in_channels,
                  [w, depth](std::size_t i, std::size_t kk) { return w[kk * depth + i]; },
                  x + n * g.in_channels * in_plane, col.data());
    T* yn = y + n * g.out_channels * out_plane;
    for (std::size_t co = 0; co < g.out_channels; ++co) std::fill_n(yn + co * out_plane, out_plane, b ? b[co] : T{});
    col2im(col.data(), g.out_channels, oh, ow, g.kernel, g.stride, g.pad, g.in_h, g.in_w, yn);
  });
}

template <typename T>
void convt_bwd(const ConvGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, T* db) {
  const std::size_t oh = g.transpose_out_h(), ow = g.transpose_out_w(), out_plane = oh * ow;
  const std::size_t in_plane = g.in_h * g.in_w;
  const std::size_t depth = g.out_channels * g.kernel * g.kernel;
  const std::size_t wsize = g.in_channels * depth;
  std::vector<T> partial(dw ? g.batch * wsize : 0);
  for_each_item(g.batch, [&](std::size_t n) {
    const T* dyn = dy + n * g.out_channels * out_plane;
    const T* xn = x + n * g.in_channels * in_plane;
    if (dx) {
      std::vector<T> col(depth * in_plane);
      im2col(dyn, g.out_channels, oh, ow, g.kernel, g.stride, g.pad, g.in_h, g.in_w, col.data());
      T* dxn = dx + n * g.in_channels * in_plane;
      std::fill_n(dxn, g.in_channels * in_plane, T{});
      gemm_dispatch(g.in_channels, in_plane, depth, [w, depth](std::size_t i, std::size_t kk) { return w[i * depth + kk]; },
                    col.data(), dxn);
    }
    if (dw) {
      std::vector<T> rows(in_plane * depth);
      im2row(dyn, g.out_channels, oh, ow, g.kernel, g.stride, g.pad, g.in_h, g.in_w, rows.data());
      T* dwn = partial.data() + n * wsize;
      std::fill_n(dwn, wsize, T{});
      gemm_dispatch(g.in_channels, depth, in_plane,
                    [xn, in_plane](std::size_t i, std::size_t kk) { return xn[i * in_plane + kk]; }, rows.data(), dwn);
    }
  });
  if (dw) reduce_items(partial, g.batch, wsize, dw);
  if (db) channel_sums(dy, g.batch, g.out_channels, out_plane, db);
}

template <typename T>
void dense_fwd(const DenseGeometry& g, const T* x, const T* w, const T* b, T* y) {
  // y^T[out, batch] = W[out, in] * x^T[in, batch]
  std::vector<T> xt(g.in * g.batch);
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t i = 0; i < g.in; ++i) xt[i * g.batch + n] = x[n * g.in + i];
  }
  std::vector<T> yt(g.out * g.batch);
  for (std::size_t o = 0; o < g.out; ++o) std::fill_n(yt.data() + o * g.batch, g.batch, b ? b[o] : T{});
  const std::size_t in = g.in;
  gemm_dispatch(g.out, g.batch, g.in, [w, in](std::size_t i, std::size_t kk) { return w[i * in + kk]; }, xt.data(),
                yt.data());
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t o = 0; o < g.out; ++o) y[n * g.out + o] = yt[o * g.batch + n];
  }
}

template <typename T>
void dense_bwd(const DenseGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, T* db) {
  const std::size_t out = g.out;
  if (dw) {
    std::fill_n(dw, g.out * g.in, T{});
    gemm_dispatch(g.out, g.in, g.batch, [dy, out](std::size_t i, std::size_t kk) { return dy[kk * out + i]; }, x, dw);
  }
  if (dx) {
    std::fill_n(dx, g.batch * g.in, T{});
    gemm_dispatch(g.batch, g.in, g.out, [dy, out](std::size_t i, std::size_t kk) { return dy[i * out + kk]; }, w, dx);
  }
  if (db) {
    std::fill_n(db, g.out, T{});
    for (std::size_t n = 0; n < g.batch; ++n) {
      for (std::size_t o = 0; o < g.out; ++o) db[o] += dy[n * g.out + o];
    }
  }
}

}  // namespace

template <typename T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c) {
  gemm_dispatch(m, n, k, [a, k](std::size_t i, std::size_t kk) { return a[i * k + kk]; }, b, c);
}

template <typename T>
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c) {
  gemm_dispatch(m, n, k, [a, m](std::size_t i, std::size_t kk) { return a[kk * m + i]; }, b, c);
}

template void gemm_nn<float>(std::size_t, std::size_t, std::size_t, const float*, const float*, float*);
template void gemm_nn<double>(std::size_t, std::size_t, std::size_t, const double*, const double*, double*);
template void gemm_tn<float>(std::size_t, std::size_t, std::size_t, const float*, const float*, float*);
template void gemm_tn<double>(std::size_t, std::size_t, std::size_t, const double*, const double*, double*);

#define HOOD_DEFINE_PARALLEL(T)                                                                               \
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

HOOD_DEFINE_PARALLEL(float)
HOOD_DEFINE_PARALLEL(double)

#undef HOOD_DEFINE_PARALLEL

}  // namespace hood::nn::parallel
