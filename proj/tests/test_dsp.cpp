#include <doctest.h>

#include <cmath>

#include "hood/dsp/erespd.hpp"
#include "hood/dsp/fft.hpp"
#include "hood/dsp/pipeline.hpp"
#include "hood/dsp/rdi.hpp"
#include "hood/error.hpp"
#include "hood/radar/simulator.hpp"
#include "support/oracles.hpp"

using namespace hood;
using namespace hood::dsp;
using radar::FrameCube;
using radar::RadarConfig;
using radar::Scene;
using radar::TargetKind;
using radar::TargetSpec;

namespace {

Scene single(TargetSpec t, double duration = 2.0) {
  Scene s;
  s.targets = {t};
  s.duration = duration;
  return s;
}

TargetSpec target(TargetKind kind, double range) {
  TargetSpec t;
  t.kind = kind;
  t.range = range;
  return t;
}

std::vector<FrameCube> frames(const Scene& s, std::size_t first, std::size_t count) {
  const RadarConfig cfg;
  std::vector<FrameCube> out;
  for (std::size_t i = first; i < first + count; ++i) out.push_back(radar::simulate_frame(cfg, s, i));
  return out;
}

std::pair<std::size_t, std::size_t> argmax(const RdiFrame& f) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.data[i] > f.data[best]) best = i;
  }
  return {best / f.n_range, best % f.n_range};
}

double energy(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}

RdiFrame image(std::size_t rows, std::size_t cols, std::vector<double> data, std::size_t index = 0) {
  RdiFrame f;
  f.n_doppler = rows;
  f.n_range = cols;
  f.data = std::move(data);
  f.frame_index = index;
  return f;
}

RdiSequence random_sequence(std::size_t n, std::size_t pixels, std::mt19937_64& rng) {
  RdiSequence s;
  for (std::size_t i = 0; i < n; ++i) s.frames.push_back(image(1, pixels, oracle::random_vector(pixels, rng, 0, 1), i));
  return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("fft wrappers satisfy Parseval and match the naive DFT") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 2u, 7u, 64u, 128u, 512u, 1000u}) {
    CAPTURE(n);
    const auto re = oracle::random_vector(n, rng);
    const auto im = oracle::random_vector(n, rng);
    std::vector<Complex> x(n);
    double time_energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = {re[i], im[i]};
      time_energy += std::norm(x[i]);
    }
    const auto big = fft(x);
    double freq_energy = 0.0;
    for (const auto& z : big) freq_energy += std::norm(z);
    CHECK(std::abs(time_energy - freq_energy / static_cast<double>(n)) <= 1e-9 * time_energy);

    const auto naive = oracle::dft(x);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(big[k] - naive[k]) < 1e-9 * std::sqrt(freq_energy));

    if (n % 2 == 0) {
      const auto half = rfft(re);
      REQUIRE(half.size() == n / 2 + 1);
      double e = std::norm(half.front()) + std::norm(half.back());
      for (std::size_t k = 1; k < n / 2; ++k) e += 2.0 * std::norm(half[k]);
      const double te = energy(re);
      CHECK(std::abs(te - e / static_cast<double>(n)) <= 1e-9 * te);
    }
  }
}

TEST_CASE("fftshift and hann window") {
  const std::vector<int> v{0, 1, 2, 3, 4, 5};
  CHECK(fftshift<int>(v) == std::vector<int>{3, 4, 5, 0, 1, 2});
  const auto w = hann_window(5);
  CHECK(w[0] == doctest::Approx(0.0));
  CHECK(w[2] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(w[3]));
  CHECK(hann_window(1) == std::vector<double>{1.0});
}

TEST_CASE("macro RDI suppresses static targets") {
  auto t = target(TargetKind::static_reflector, 2.1);
  t.rcs_amplitude = 1.5;
  Scene s = single(t);
  s.targets.push_back(target(TargetKind::static_reflector, 4.0));
  const auto win = frames(s, 3, 2);
  const auto rdi = compute_macro_rdi(win);
  CHECK(rdi.n_doppler == 64);
  CHECK(rdi.n_range == 64);
  CHECK(rdi.frame_index == 4);

  const auto profile = range_profiles(win.back(), false);
  double peak = 0.0, input_energy = 0.0;
  for (const auto& z : profile.data) {
    peak = std::max(peak, std::abs(z));
    input_energy += std::norm(z);
  }
  double max_pixel = 0.0;
  for (double v : rdi.data) max_pixel = std::max(max_pixel, v);
  CHECK(max_pixel <= 1e-9 * peak);
  CHECK(energy(rdi.data) <= 1e-12 * input_energy);

  DspConfig ema;
  ema.mti = MtiMode::exponential;
  const auto rdi_ema = compute_macro_rdi(frames(s, 0, 8), ema);
  CHECK(energy(rdi_ema.data) <= 1e-12 * input_energy);
}

TEST_CASE("macro RDI places a 1 m/s mover at doppler row 42, range column 10") {
  auto t = target(TargetKind::moving_point, 1.5);
  t.velocity = 1.0;
  const auto rdi = compute_macro_rdi(frames(single(t, 1.0), 0, 2));
  const auto [row, col] = argmax(rdi);
  CHECK(col == 10);
  CHECK(std::abs(static_cast<long>(row) - 42) <= 1);

  t.velocity = -1.0;
  t.range = 2.5;
  const auto neg = compute_macro_rdi(frames(single(t, 1.0), 0, 2));
  const auto [nrow, ncol] = argmax(neg);
  CHECK(std::abs(static_cast<long>(nrow) - 22) <= 1);
  CHECK(std::abs(static_cast<long>(ncol) - 17) <= 1);
}

TEST_CASE("zero frames give zero RDIs") {
  Scene empty;
  empty.duration = 1.0;
  const auto win = frames(empty, 0, 8);
  const auto macro = compute_macro_rdi(std::span(win).subspan(6, 2));
  const auto micro = compute_micro_rdi(win);
  CHECK(macro.data == std::vector<double>(64 * 64, 0.0));
  CHECK(micro.data == std::vector<double>(64 * 64, 0.0));
}

TEST_CASE("micro RDI concentrates breathing near zero doppler at the human's range") {
  auto h = target(TargetKind::breathing_human, 1.5);
  h.breath_rate = 0.25;
  h.chest_amplitude = 3e-3;
  const Scene s = single(h, 4.0);
  for (std::size_t start : {0u, 10u, 25u, 60u}) {
    CAPTURE(start);
    const auto rdi = compute_micro_rdi(frames(s, start, 8));
    REQUIRE(rdi.n_doppler == 64);
    REQUIRE(rdi.n_range == 64);
    const auto [row, col] = argmax(rdi);
    CHECK(col == 10);
    CHECK(std::abs(static_cast<long>(row) - 32) <= 4);
    double near = 0.0, total = 0.0;
    for (std::size_t d = 0; d < 64; ++d) {
      const double e = rdi.at(d, 10) * rdi.at(d, 10);
      total += e;
      if (d >= 28 && d <= 36) near += e;
    }
    CHECK(near > 0.5 * total);
  }
}

TEST_CASE("micro RDI of a static reflector leaves only a tiny residual") {
  const Scene s = single(target(TargetKind::static_reflector, 3.0), 1.0);
  const auto win = frames(s, 0, 8);
  const auto rdi = compute_micro_rdi(win);
  const auto profile = range_profiles(win.back(), true);
  double peak = 0.0;
  for (const auto& z : profile.data) peak = std::max(peak, std::abs(z));
  double max_pixel = 0.0;
  for (double v : rdi.data) max_pixel = std::max(max_pixel, v);
  CHECK(max_pixel <= 1e-9 * peak);
}

TEST_CASE("RDI window and shape errors") {
  const Scene s = single(target(TargetKind::static_reflector, 3.0), 1.0);
  const auto win = frames(s, 0, 8);
  CHECK_THROWS_AS(compute_macro_rdi(std::span(win).first(1)), ValidationError);
  CHECK_THROWS_AS(compute_micro_rdi(std::span(win).first(7)), ValidationError);
  auto bad = win;
  bad[3].n_chirps = 32;
  bad[3].data.resize(3 * 32 * 128);
  CHECK_THROWS_AS(compute_micro_rdi(bad), ShapeError);
  DspConfig even;
  even.sinc_taps = 64;
  CHECK_THROWS_AS(even.validate(), ValidationError);
}

TEST_CASE("sinc kernel has unit DC gain and is symmetric") {
  const auto h = sinc_kernel(65, 0.1);
  double sum = 0.0;
  for (double v : h) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i] == doctest::Approx(h[h.size() - 1 - i]).epsilon(1e-12));
}

TEST_CASE("erespd examples") {
  RdiSequence ones;
  for (std::size_t i = 0; i < 201; ++i) ones.frames.push_back(image(2, 2, std::vector<double>(4, 1.0), i));
  const auto out = erespd(ones, 200);
  REQUIRE(out.size() == 2);
  for (const auto& f : out.frames) CHECK(f.data == std::vector<double>(4, 200.0));
  CHECK(out.frames[0].frame_index == 0);
  CHECK(out.frames[1].frame_index == 1);

  RdiSequence ramp;
  for (std::size_t i = 0; i < 5; ++i) {
    ramp.frames.push_back(image(1, 3, std::vector<double>(3, static_cast<double>(i)), i));
  }
  const auto r = erespd(ramp, 3);
  REQUIRE(r.size() == 3);
  CHECK(r.frames[0].data[0] == 3.0);
  CHECK(r.frames[1].data[0] == 6.0);
  CHECK(r.frames[2].data[0] == 9.0);

  CHECK_THROWS_AS(erespd(ramp, 6), ValidationError);
}

TEST_CASE("erespd matches the naive window sum and its window arithmetic") {
  std::mt19937_64 rng(2);
  const auto seq = random_sequence(300, 64 * 64, rng);
  std::vector<std::vector<double>> raw;
  for (const auto& f : seq.frames) raw.push_back(f.data);
  const auto expected = oracle::window_sums(raw, 200);
  const auto got = erespd(seq, 200);
  REQUIRE(got.size() == 101);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(max_abs_diff(got.frames[i].data, expected[i]) <= 1e-6);

  for (std::size_t n : {10u, 37u, 64u}) {
    for (std::size_t w : {1u, 5u, 10u}) {
      if (w <= n) CHECK(erespd(random_sequence(n, 3, rng), w).size() == n - w + 1);
    }
  }
}

TEST_CASE("erespd is linear and shift equivariant") {
  std::mt19937_64 rng(3);
  const auto a = random_sequence(260, 50, rng);
  const auto b = random_sequence(260, 50, rng);
  const double ca = 1.7, cb = -0.6;
  RdiSequence mix = a;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    for (std::size_t k = 0; k < 50; ++k) mix.frames[i].data[k] = ca * a.frames[i].data[k] + cb * b.frames[i].data[k];
  }
  const auto ea = erespd(a), eb = erespd(b), em = erespd(mix);
  for (std::size_t i = 0; i < em.size(); ++i) {
    std::vector<double> lin(50);
    for (std::size_t k = 0; k < 50; ++k) lin[k] = ca * ea.frames[i].data[k] + cb * eb.frames[i].data[k];
    CHECK(oracle::relative_error(em.frames[i].data, lin) < 1e-9);
  }

  RdiSequence dropped = a;
  dropped.frames.erase(dropped.frames.begin());
  const auto ed = erespd(dropped);
  REQUIRE(ed.size() + 1 == ea.size());
  for (std::size_t i = 0; i < ed.size(); ++i) {
    CHECK(ed.frames[i].frame_index == ea.frames[i + 1].frame_index);
    CHECK(oracle::relative_error(ed.frames[i].data, ea.frames[i + 1].data) < 1e-12);
  }
}

TEST_CASE("streaming erespd buffers, then tracks the naive sum over 10k frames") {
  std::mt19937_64 rng(4);
  const auto seq = random_sequence(10000, 16, rng);
  std::vector<std::vector<double>> raw;
  for (const auto& f : seq.frames) raw.push_back(f.data);
  const auto expected = oracle::window_sums(raw, 200);

  ErespdStream stream(200);
  std::size_t emitted = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto out = stream.push(seq.frames[i]);
    if (i < 199) {
      CHECK_FALSE(out.has_value());
      continue;
    }
    REQUIRE(out.has_value());
    worst = std::max(worst, max_abs_diff(out->data, expected[emitted]));
    CHECK(out->frame_index == emitted);
    ++emitted;
  }
  CHECK(emitted == 10000 - 199);
  CHECK(worst <= 1e-5);

  const auto batch = erespd(seq, 200);
  ErespdStream again(200);
  std::optional<RdiFrame> first;
  for (std::size_t i = 0; i < 200; ++i) first = again.push(seq.frames[i]);
  REQUIRE(first.has_value());
  CHECK(max_abs_diff(first->data, batch.frames[0].data) <= 1e-6);

  CHECK_THROWS_AS(again.push(image(4, 5, std::vector<double>(20, 0.0))), ShapeError);
}

TEST_CASE("normalize_rdi") {
  const auto n = normalize_rdi(image(1, 3, {2.0, 4.0, 6.0}));
  CHECK(n.data == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(normalize_rdi(image(2, 2, std::vector<double>(4, 7.0))).data == std::vector<double>(4, 0.0));
  const std::vector<double> canon{0.0, 0.25, 1.0, 0.5};
  CHECK(normalize_rdi(image(2, 2, canon)).data == canon);
  CHECK_THROWS_AS(normalize_rdi(image(1, 2, {1.0, std::nan("")})), ValidationError);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto once = normalize_rdi(image(4, 4, oracle::random_vector(16, rng, -50, 80)));
    for (double v : once.data) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(max_abs_diff(normalize_rdi(once).data, once.data) < 1e-15);
  }
}

TEST_CASE("preprocessing emits N - 7 - 200 + 1 pairs and streaming matches batch") {
  const RadarConfig cfg;
  Scene s = radar::preset_scene(radar::Preset::id_very_static, 9);
  s.duration = 11.0;  // 220 frames
  s.noise_std = 0.01;
  const auto rec = radar::simulate_recording(cfg, s);
  REQUIRE(rec.size() == 220);
  CHECK(min_frames_for_pair({}) == 207);

  const auto batch = preprocess_recording(rec);
  REQUIRE(batch.size() == 220 - 7 - 200 + 1);

  RdiPipeline pipe;
  std::vector<PairedRdi> streamed;
  for (const auto& f : rec) {
    if (auto p = pipe.push(f)) streamed.push_back(std::move(*p));
  }
  CHECK(pipe.frames_seen() == 220);
  REQUIRE(streamed.size() == batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(streamed[i].macro.data == batch[i].macro.data);
    CHECK(streamed[i].micro.data == batch[i].micro.data);
    CHECK(batch[i].last_frame_index == 206 + i);
    CHECK(streamed[i].last_frame_index == batch[i].last_frame_index);
    for (double v : batch[i].macro.data) REQUIRE((v >= 0.0 && v <= 1.0));
    for (double v : batch[i].micro.data) REQUIRE((v >= 0.0 && v <= 1.0));
  }

  CHECK_THROWS_AS(preprocess_recording(std::span(rec).first(206)), ValidationError);
  auto shrunk = rec[5];
  shrunk.n_chirps = 32;
  shrunk.data.resize(3 * 32 * 128);
  RdiPipeline p2;
  p2.push(rec[0]);
  CHECK_THROWS_AS(p2.push(shrunk), ShapeError);
}
