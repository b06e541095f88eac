#pragma once

#include <cstddef>

// Compute kernels behind the layers. Two implementations share one interface:
//   reference: direct nested loops, serial; the readable definition, used by tests.
//   parallel:  im2col + row-blocked GEMM, OpenMP over batch items or output rows.
// Every output element of the parallel kernels is reduced in a fixed order, so
// results do not depend on the thread count. The two namespaces agree to
// rounding, not bit-for-bit.

namespace hood::nn {

/// Geometry of a 2-D convolution (or its transpose) over an NCHW batch.
/// For conv2d, (in_h, in_w) -> (out_h, out_w) with
///   out = (in + 2 pad - kernel) / stride + 1.
/// For conv_transpose2d the mapping is
///   out = (in - 1) stride - 2 pad + kernel + output_padding.
struct ConvGeometry {
  std::size_t batch = 1;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t in_h = 1, in_w = 1;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t pad = 0;
  std::size_t output_padding = 0;

  std::size_t conv_out_h() const { return (in_h + 2 * pad - kernel) / stride + 1; }
  std::size_t conv_out_w() const { return (in_w + 2 * pad - kernel) / stride + 1; }
  std::size_t transpose_out_h() const { return (in_h - 1) * stride + kernel + output_padding - 2 * pad; }
  std::size_t transpose_out_w() const { return (in_w - 1) * stride + kernel + output_padding - 2 * pad; }
};

/// Fully connected layer geometry: x[batch, in] -> y[batch, out], W[out, in].
struct DenseGeometry {
  std::size_t batch = 1;
  std::size_t in = 1;
  std::size_t out = 1;
};

#define HOOD_DECLARE_KERNELS(T)                                                                          \
  /* y = conv(x, w) + b; w is [out_c, in_c, k, k]. */                                                   \
  void conv2d_forward(const ConvGeometry& g, const T* x, const T* w, const T* b, T* y);                 \
  /* Gradients; dx/dw/db are overwritten. Any of dx/dw/db may be null to skip. */                       \
  void conv2d_backward(const ConvGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, T* db);  \
  /* w is [in_c, out_c, k, k]. */                                                                        \
  void conv_transpose2d_forward(const ConvGeometry& g, const T* x, const T* w, const T* b, T* y);       \
  void conv_transpose2d_backward(const ConvGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, \
                                 T* db);                                                                 \
  void dense_forward(const DenseGeometry& g, const T* x, const T* w, const T* b, T* y);                 \
  void dense_backward(const DenseGeometry& g, const T* x, const T* w, const T* dy, T* dx, T* dw, T* db);

namespace reference {
HOOD_DECLARE_KERNELS(float)
HOOD_DECLARE_KERNELS(double)
}  // namespace reference

namespace parallel {
HOOD_DECLARE_KERNELS(float)
HOOD_DECLARE_KERNELS(double)

/// C[m, n] += A[m, k] * B[k, n], row-major, rows of C split across threads.
template <typename T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c);
/// C[m, n] += A[k, m]^T * B[k, n].
template <typename T>
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c);
}  // namespace parallel

#undef HOOD_DECLARE_KERNELS

}  // namespace hood::nn
