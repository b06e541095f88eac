#include "hood/dsp/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace hood::dsp {

namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
// Plans are created once per (size, kind) and live for the process.
class PlanCache {
 public:
  enum class Kind { complex_forward, real_forward };

  fftw_plan get(Kind kind, std::size_t n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(kind, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const int len = static_cast<int>(n);
    fftw_plan plan = nullptr;
    if (kind == Kind::complex_forward) {
      auto* in = fftw_alloc_complex(n);
      auto* out = fftw_alloc_complex(n);
      plan = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
      fftw_free(in);
      fftw_free(out);
    } else {
      auto* in = fftw_alloc_real(n);
      auto* out = fftw_alloc_complex(n / 2 + 1);
      plan = fftw_plan_dft_r2c_1d(len, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
      fftw_free(in);
      fftw_free(out);
    }
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<Kind, std::size_t>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

std::vector<Complex> fft(std::span<const Complex> input) {
  std::vector<Complex> out(input.size());
  if (input.empty()) return out;
  std::vector<Complex> in(input.begin(), input.end());
  fftw_plan plan = plan_cache().get(PlanCache::Kind::complex_forward, input.size());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<Complex> rfft(std::span<const double> input) {
  if (input.empty()) return {};
  std::vector<Complex> out(input.size() / 2 + 1);
  std::vector<double> in(input.begin(), input.end());
  fftw_plan plan = plan_cache().get(PlanCache::Kind::real_forward, input.size());
  fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom);
  }
  return w;
}

}  // namespace hood::dsp
