// Reference vs parallel compute kernels at the shapes the model runs.
//   ./bench_kernels --benchmark_filter=conv
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "hood/nn/kernels.hpp"

namespace {

using namespace hood::nn;

std::vector<float> random_buffer(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Encoder's first layer on a batch of 16 64x64 images.
ConvGeometry encoder_conv() {
  ConvGeometry g;
  g.batch = 16;
  g.in_channels = 1;
  g.out_channels = 16;
  g.in_h = g.in_w = 64;
  g.kernel = 3;
  g.stride = 2;
  g.pad = 1;
  return g;
}

// Encoder's second layer: 16 -> 64 channels, 32x32 -> 16x16.
ConvGeometry middle_conv() {
  ConvGeometry g;
  g.batch = 16;
  g.in_channels = 16;
  g.out_channels = 64;
  g.in_h = g.in_w = 32;
  g.kernel = 3;
  g.stride = 2;
  g.pad = 1;
  return g;
}

// Decoder's first upsampling: 64 channels, 16x16 -> 32x32.
ConvGeometry decoder_up() {
  ConvGeometry g;
  g.batch = 16;
  g.in_channels = 64;
  g.out_channels = 64;
  g.in_h = g.in_w = 16;
  g.kernel = 3;
  g.stride = 2;
  g.pad = 1;
  g.output_padding = 1;
  return g;
}

using F = float;
using ConvForward = void (*)(const ConvGeometry&, const F*, const F*, const F*, F*);
using ConvBackward = void (*)(const ConvGeometry&, const F*, const F*, const F*, F*, F*, F*);
using DenseForward = void (*)(const DenseGeometry&, const F*, const F*, const F*, F*);
using DenseBackward = void (*)(const DenseGeometry&, const F*, const F*, const F*, F*, F*, F*);

void conv_forward(benchmark::State& state, ConvForward Fn, ConvGeometry g) {
  const auto x = random_buffer(g.batch * g.in_channels * g.in_h * g.in_w, 1);
  const auto w = random_buffer(g.out_channels * g.in_channels * g.kernel * g.kernel, 2);
  const auto b = random_buffer(g.out_channels, 3);
  std::vector<float> y(g.batch * g.out_channels * g.conv_out_h() * g.conv_out_w());
  for (auto _ : state) {
    Fn(g, x.data(), w.data(), b.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}

void conv_backward(benchmark::State& state, ConvBackward Fn, ConvGeometry g) {
  const auto x = random_buffer(g.batch * g.in_channels * g.in_h * g.in_w, 1);
  const auto w = random_buffer(g.out_channels * g.in_channels * g.kernel * g.kernel, 2);
  const auto dy = random_buffer(g.batch * g.out_channels * g.conv_out_h() * g.conv_out_w(), 3);
  std::vector<float> dx(x.size()), dw(w.size()), db(g.out_channels);
  for (auto _ : state) {
    Fn(g, x.data(), w.data(), dy.data(), dx.data(), dw.data(), db.data());
    benchmark::DoNotOptimize(dw.data());
  }
}

void transpose_forward(benchmark::State& state, ConvForward Fn, ConvGeometry g) {
  const auto x = random_buffer(g.batch * g.in_channels * g.in_h * g.in_w, 1);
  const auto w = random_buffer(g.in_channels * g.out_channels * g.kernel * g.kernel, 2);
  const auto b = random_buffer(g.out_channels, 3);
  std::vector<float> y(g.batch * g.out_channels * g.transpose_out_h() * g.transpose_out_w());
  for (auto _ : state) {
    Fn(g, x.data(), w.data(), b.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}

void transpose_backward(benchmark::State& state, ConvBackward Fn, ConvGeometry g) {
  const auto x = random_buffer(g.batch * g.in_channels * g.in_h * g.in_w, 1);
  const auto w = random_buffer(g.in_channels * g.out_channels * g.kernel * g.kernel, 2);
  const auto dy = random_buffer(g.batch * g.out_channels * g.transpose_out_h() * g.transpose_out_w(), 3);
  std::vector<float> dx(x.size()), dw(w.size()), db(g.out_channels);
  for (auto _ : state) {
    Fn(g, x.data(), w.data(), dy.data(), dx.data(), dw.data(), db.data());
    benchmark::DoNotOptimize(dw.data());
  }
}

void dense_forward(benchmark::State& state, DenseForward Fn) {
  const DenseGeometry g{16, 16384, 64};
  const auto x = random_buffer(g.batch * g.in, 1);
  const auto w = random_buffer(g.out * g.in, 2);
  const auto b = random_buffer(g.out, 3);
  std::vector<float> y(g.batch * g.out);
  for (auto _ : state) {
    Fn(g, x.data(), w.data(), b.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}

void dense_backward(benchmark::State& state, DenseBackward Fn) {
  const DenseGeometry g{16, 16384, 64};
  const auto x = random_buffer(g.batch * g.in, 1);
  const auto w = random_buffer(g.out * g.in, 2);
  const auto dy = random_buffer(g.batch * g.out, 3);
  std::vector<float> dx(x.size()), dw(w.size()), db(g.out);
  for (auto _ : state) {
    Fn(g, x.data(), w.data(), dy.data(), dx.data(), dw.data(), db.data());
    benchmark::DoNotOptimize(dw.data());
  }
}

void register_all() {
  auto add = [](const std::string& name, auto fn) {
    benchmark::RegisterBenchmark(name.c_str(), fn)->Unit(benchmark::kMicrosecond);
  };
  struct Shape {
    const char* name;
    ConvGeometry g;
  };
  struct Impl {
    const char* name;
    ConvForward conv_fwd;
    ConvBackward conv_bwd;
    ConvForward tr_fwd;
    ConvBackward tr_bwd;
    DenseForward dense_fwd;
    DenseBackward dense_bwd;
  };
  const Impl impls[] = {
      {"reference", reference::conv2d_forward, reference::conv2d_backward, reference::conv_transpose2d_forward,
       reference::conv_transpose2d_backward, reference::dense_forward, reference::dense_backward},
      {"parallel", parallel::conv2d_forward, parallel::conv2d_backward, parallel::conv_transpose2d_forward,
       parallel::conv_transpose2d_backward, parallel::dense_forward, parallel::dense_backward},
  };
  for (const auto& [name, g] : {Shape{"encoder", encoder_conv()}, Shape{"second", middle_conv()}}) {
    for (const auto& k : impls) {
      const std::string suffix = std::string(name) + "/" + k.name;
      add("conv_forward/" + suffix, [g, f = k.conv_fwd](benchmark::State& s) { conv_forward(s, f, g); });
      add("conv_backward/" + suffix, [g, f = k.conv_bwd](benchmark::State& s) { conv_backward(s, f, g); });
    }
  }
  const auto up = decoder_up();
  for (const auto& k : impls) {
    const std::string impl = k.name;
    add("transpose_forward/decoder/" + impl, [up, f = k.tr_fwd](benchmark::State& s) { transpose_forward(s, f, up); });
    add("transpose_backward/decoder/" + impl,
        [up, f = k.tr_bwd](benchmark::State& s) { transpose_backward(s, f, up); });
    add("dense_forward/" + impl, [f = k.dense_fwd](benchmark::State& s) { dense_forward(s, f); });
    add("dense_backward/" + impl, [f = k.dense_bwd](benchmark::State& s) { dense_backward(s, f); });
  }
}

}  // namespace

int main(int argc, char** argv) {
  register_all();
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
}
