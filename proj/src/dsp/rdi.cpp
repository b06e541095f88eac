#include "hood/dsp/rdi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hood/error.hpp"

namespace hood::dsp {

namespace {

double magnitude(const Complex& z, bool log_scale) {
  const double m = std::abs(z);
  return log_scale ? std::log1p(m) : m;
}

void check_profiles(std::span<const RangeProfiles> window) {
  for (const auto& p : window) {
    if (p.n_chirps != window.front().n_chirps || p.n_range != window.front().n_range) {
      throw ShapeError("range profiles in one window differ in shape");
    }
  }
}

void check_frames(std::span<const radar::FrameCube> window) {
  for (const auto& f : window) {
    if (f.n_rx != window.front().n_rx || f.n_chirps != window.front().n_chirps ||
        f.n_samples != window.front().n_samples || f.data.size() != f.n_rx * f.n_chirps * f.n_samples) {
      throw ShapeError("frame cubes in one window differ in shape");
    }
  }
}

}  // namespace

void RdiSequence::validate() const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (f.kind != kind) throw ValidationError("RDI sequence mixes macro and micro frames");
    if (f.n_doppler != frames.front().n_doppler || f.n_range != frames.front().n_range ||
        f.data.size() != f.n_doppler * f.n_range) {
      throw ShapeError("RDI sequence frames differ in shape");
    }
    if (i > 0 && f.frame_index <= frames[i - 1].frame_index) {
      throw ValidationError("RDI sequence frame indices must strictly increase");
    }
  }
}

void DspConfig::validate() const {
  if (micro_stack < 1) throw ValidationError("micro_stack must be >= 1");
  if (micro_doppler_bins < 1) throw ValidationError("micro_doppler_bins must be >= 1");
  if (!(sinc_cutoff > 0.0 && sinc_cutoff <= 1.0)) throw ValidationError("sinc_cutoff must lie in (0, 1]");
  if (sinc_taps < 1 || sinc_taps % 2 == 0) throw ValidationError("sinc_taps must be odd");
  if (erespd_window < 1) throw ValidationError("erespd_window must be >= 1");
  if (!(mti_alpha > 0.0 && mti_alpha <= 1.0)) throw ValidationError("mti_alpha must lie in (0, 1]");
}

RangeProfiles range_profiles(const radar::FrameCube& frame, bool remove_fast_time_mean) {
  const std::size_t ns = frame.n_samples;
  const std::size_t nr = ns / 2;
  const auto window = hann_window(ns);
  RangeProfiles out;
  out.n_chirps = frame.n_chirps;
  out.n_range = nr;
  out.frame_index = frame.frame_index;
  out.data.assign(frame.n_chirps * nr, Complex{});
  std::vector<double> chirp(ns);
  const double inv_rx = 1.0 / static_cast<double>(frame.n_rx);
  for (std::size_t c = 0; c < frame.n_chirps; ++c) {
    std::fill(chirp.begin(), chirp.end(), 0.0);
    for (std::size_t rx = 0; rx < frame.n_rx; ++rx) {
      const auto samples = frame.chirp(rx, c);
      for (std::size_t n = 0; n < ns; ++n) chirp[n] += samples[n];
    }
    double mean = 0.0;
    for (auto& x : chirp) {
      x *= inv_rx;
      mean += x;
    }
    mean /= static_cast<double>(ns);
    for (std::size_t n = 0; n < ns; ++n) {
      chirp[n] = (remove_fast_time_mean ? chirp[n] - mean : chirp[n]) * window[n];
    }
    const auto spectrum = rfft(chirp);
    std::copy_n(spectrum.begin(), nr, out.data.begin() + static_cast<std::ptrdiff_t>(c * nr));
  }
  return out;
}

RdiFrame macro_rdi_from_profiles(std::span<const RangeProfiles> window, const DspConfig& config) {
  if (window.size() < 2) throw ValidationError("macro RDI needs at least two frames for MTI");
  check_profiles(window);
  const std::size_t nc = window.front().n_chirps;
  const std::size_t nr = window.front().n_range;
  const auto& current = window.back();

  // Clutter estimate: previous frame, or an exponential average over the window.
  std::vector<Complex> clutter(window.front().data);
  if (config.mti == MtiMode::exponential) {
    for (std::size_t i = 1; i + 1 < window.size(); ++i) {
      for (std::size_t k = 0; k < clutter.size(); ++k) {
        clutter[k] = config.mti_alpha * window[i].data[k] + (1.0 - config.mti_alpha) * clutter[k];
      }
    }
  } else {
    clutter = window[window.size() - 2].data;
  }

  RdiFrame out;
  out.kind = RdiKind::macro;
  out.n_doppler = nc;
  out.n_range = nr;
  out.frame_index = current.frame_index;
  out.data.assign(nc * nr, 0.0);
  const auto slow_window = hann_window(nc);
  std::vector<Complex> slow(nc);
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t c = 0; c < nc; ++c) {
      slow[c] = (current.data[c * nr + r] - clutter[c * nr + r]) * slow_window[c];
    }
    const auto spectrum = fftshift<Complex>(fft(slow));
    for (std::size_t d = 0; d < nc; ++d) out.data[d * nr + r] = magnitude(spectrum[d], config.log_magnitude);
  }
  return out;
}

RdiFrame compute_macro_rdi(std::span<const radar::FrameCube> window, const DspConfig& config) {
  if (window.size() < 2) throw ValidationError("macro RDI needs at least two frames for MTI");
  check_frames(window);
  std::vector<RangeProfiles> profiles;
  profiles.reserve(window.size());
  for (const auto& f : window) profiles.push_back(range_profiles(f, false));
  return macro_rdi_from_profiles(profiles, config);
}

std::vector<double> sinc_kernel(std::size_t taps, double cutoff_fraction) {
  // Cutoff in cycles/sample; the slow-time Nyquist frequency is 0.5.
  const double fc = 0.5 * cutoff_fraction;
  const auto window = hann_window(taps + 2);  // drop the zero end points
  const double center = 0.5 * static_cast<double>(taps - 1);
  std::vector<double> h(taps);
  double sum = 0.0;
  for (std::size_t m = 0; m < taps; ++m) {
    const double x = static_cast<double>(m) - center;
    const double arg = 2.0 * fc * x;
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    h[m] = 2.0 * fc * sinc * window[m + 1];
    sum += h[m];
  }
  for (auto& v : h) v /= sum;
  return h;
}

RdiFrame micro_rdi_from_profiles(std::span<const RangeProfiles> window, const DspConfig& config) {
  if (window.size() != config.micro_stack) {
    throw ValidationError("micro RDI needs exactly " + std::to_string(config.micro_stack) + " frames, got " +
                          std::to_string(window.size()));
  }
  check_profiles(window);
  const std::size_t nc = window.front().n_chirps;
  const std::size_t nr = window.front().n_range;
  const std::size_t slow_len = nc * window.size();
  const std::size_t keep = std::min(config.micro_doppler_bins, slow_len);
  const std::size_t first_row = slow_len / 2 - keep / 2;

  const auto kernel = sinc_kernel(config.sinc_taps, config.sinc_cutoff);
  const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const auto slow_window = hann_window(slow_len);

  RdiFrame out;
  out.kind = RdiKind::micro;
  out.n_doppler = keep;
  out.n_range = nr;
  out.frame_index = window.back().frame_index;
  out.data.assign(keep * nr, 0.0);

  std::vector<Complex> slow(slow_len);
  std::vector<Complex> filtered(slow_len);
  for (std::size_t r = 0; r < nr; ++r) {
    Complex mean{};
    for (std::size_t f = 0; f < window.size(); ++f) {
      for (std::size_t c = 0; c < nc; ++c) {
        slow[f * nc + c] = window[f].data[c * nr + r];
        mean += slow[f * nc + c];
      }
    }
    mean /= static_cast<double>(slow_len);
    for (auto& z : slow) z -= mean;

    const auto n = static_cast<std::ptrdiff_t>(slow_len);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      Complex acc{};
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
      for (std::ptrdiff_t j = lo; j <= hi; ++j) acc += kernel[static_cast<std::size_t>(j - i + half)] * slow[j];
      filtered[static_cast<std::size_t>(i)] = acc * slow_window[static_cast<std::size_t>(i)];
    }
    const auto spectrum = fftshift<Complex>(fft(filtered));
    for (std::size_t d = 0; d < keep; ++d) {
      out.data[d * nr + r] = magnitude(spectrum[first_row + d], config.log_magnitude);
    }
  }
  return out;
}

RdiFrame compute_micro_rdi(std::span<const radar::FrameCube> window, const DspConfig& config) {
  if (window.size() != config.micro_stack) {
    throw ValidationError("micro RDI needs exactly " + std::to_string(config.micro_stack) + " frames, got " +
                          std::to_string(window.size()));
  }
  check_frames(window);
  std::vector<RangeProfiles> profiles;
  profiles.reserve(window.size());
  for (const auto& f : window) profiles.push_back(range_profiles(f, true));
  return micro_rdi_from_profiles(profiles, config);
}

RdiFrame normalize_rdi(const RdiFrame& frame) {
  RdiFrame out = frame;
  if (frame.data.empty()) return out;
  double lo = frame.data.front();
  double hi = frame.data.front();
  for (double v : frame.data) {
    if (std::isnan(v)) throw ValidationError("cannot normalize an RDI containing NaN");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ValidationError("cannot normalize a non-finite RDI");
  if (hi == lo) {
    std::fill(out.data.begin(), out.data.end(), 0.0);
    return out;
  }
  const double scale = 1.0 / (hi - lo);
  for (auto& v : out.data) v = std::clamp((v - lo) * scale, 0.0, 1.0);
  return out;
}

}  // namespace hood::dsp
