#pragma once

#include <functional>
#include <random>
#include <vector>

#include "hood/nn/layers.hpp"
#include "oracles.hpp"

namespace gradcheck {

using hood::nn::Parameter;
using hood::nn::Tensor;

struct Result {
  double input_error = 0.0;
  double param_error = 0.0;
  double worst() const { return std::max(input_error, param_error); }
};

/// Checks a layer's analytic backward against central differences of the
/// scalar L = sum_i w_i y_i with random weights w. Parameters with more than
/// `max_entries` values are checked on a random subset.
inline Result check(const std::function<Tensor<double>(const Tensor<double>&)>& forward,
                    const std::function<Tensor<double>(const Tensor<double>&)>& backward, Tensor<double> x,
                    const std::vector<Parameter<double>*>& params, std::mt19937_64& rng, double h = 1e-5,
                    std::size_t max_entries = 400) {
  const Tensor<double> y0 = forward(x);
  const auto w = oracle::random_vector(y0.size(), rng);
  for (auto* p : params) p->zero_grad();
  const Tensor<double> dx = backward(Tensor<double>(y0.shape(), w));

  auto loss = [&] {
    const auto y = forward(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += w[i] * y[i];
    return acc;
  };

  Result r;
  std::vector<double*> xs;
  for (auto& v : x.values()) xs.push_back(&v);
  r.input_error = oracle::relative_error(dx.values(), oracle::numeric_gradient(loss, xs, h));

  std::vector<double*> ps;
  std::vector<double> analytic;
  for (auto* p : params) {
    std::vector<std::size_t> idx(p->value.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (idx.size() > max_entries) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(max_entries);
    }
    for (auto i : idx) {
      ps.push_back(&p->value[i]);
      analytic.push_back(p->grad[i]);
    }
  }
  if (!ps.empty()) r.param_error = oracle::relative_error(analytic, oracle::numeric_gradient(loss, ps, h));
  return r;
}

inline Tensor<double> random_tensor(hood::nn::Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  const auto n = hood::nn::shape_size(shape);
  return Tensor<double>(std::move(shape), oracle::random_vector(n, rng, lo, hi));
}

inline void randomize(Parameter<double>& p, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  p.value = random_tensor(p.value.shape(), rng, lo, hi);
}

}  // namespace gradcheck
