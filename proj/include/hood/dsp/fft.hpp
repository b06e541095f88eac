#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hood::dsp {

using Complex = std::complex<double>;

/// Forward DFT, X[k] = sum_n x[n] exp(-2 pi i k n / N), unnormalized.
std::vector<Complex> fft(std::span<const Complex> input);

/// Real-input forward DFT returning the N/2 + 1 non-redundant bins.
std::vector<Complex> rfft(std::span<const double> input);

/// Rotates so the zero-frequency bin sits at index N/2.
template <typename T>
std::vector<T> fftshift(std::span<const T> input) {
  const std::size_t n = input.size();
  std::vector<T> out(n);
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < n; ++i) out[(i + half) % n] = input[i];
  return out;
}

/// Symmetric Hann window of length n (n == 1 gives {1}).
std::vector<double> hann_window(std::size_t n);

}  // namespace hood::dsp
