#include "rarepat/mlp.hpp"

#include <cmath>

#include "rarepat/errors.hpp"

namespace rarepat {

Mlp::Mlp(uint32_t n_in, std::vector<uint32_t> hidden, uint32_t n_out)
    : n_in_(n_in), n_out_(n_out), hidden_(std::move(hidden)) {
  size_t offset = 0;
  uint32_t prev = n_in_;
  auto add_layer = [&](uint32_t width) {
    Layer l;
    l.in = prev;
    l.out = width;
    l.w_offset = offset;
    offset += static_cast<size_t>(width) * prev;
    l.b_offset = offset;
    offset += width;
    layers_.push_back(l);
    prev = width;
  };
  for (uint32_t h : hidden_) add_layer(h);
  add_layer(n_out_);
  n_params_ = offset;
  params_.assign(n_params_, 0.0);
}

void Mlp::init(Rng& rng, double out_scale) {
  for (size_t li = 0; li < layers_.size(); ++li) {
    const Layer& l = layers_[li];
    const double bound = std::sqrt(6.0 / (l.in + l.out));
    const double scale = (li + 1 == layers_.size()) ? out_scale : 1.0;
    for (size_t k = 0; k < static_cast<size_t>(l.out) * l.in; ++k)
      params_[l.w_offset + k] = rng.symmetric(bound) * scale;
    for (size_t k = 0; k < l.out; ++k) params_[l.b_offset + k] = 0.0;
  }
}

void Mlp::forward(std::span<const double> input, Cache& cache) const {
  if (input.size() != n_in_)
    throw ValidationError("network input width mismatch");
  cache.acts.resize(layers_.size() + 1);
  cache.acts[0].assign(input.begin(), input.end());
  for (size_t li = 0; li < layers_.size(); ++li) {
    const Layer& l = layers_[li];
    const auto& x = cache.acts[li];
    auto& y = cache.acts[li + 1];
    y.assign(l.out, 0.0);
    const double* w = params_.data() + l.w_offset;
    const double* b = params_.data() + l.b_offset;
    for (uint32_t o = 0; o < l.out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<size_t>(o) * l.in;
      for (uint32_t i = 0; i < l.in; ++i) acc += row[i] * x[i];
      y[o] = acc;
    }
    if (li + 1 < layers_.size())
      for (double& v : y) v = std::tanh(v);
  }
}

void Mlp::backward(const Cache& cache, std::span<const double> d_output,
                   std::span<double> grad) const {
  if (grad.size() != n_params_)
    throw ValidationError("gradient buffer size mismatch");
  std::vector<double> delta(d_output.begin(), d_output.end());
  std::vector<double> next_delta;
  for (size_t li = layers_.size(); li-- > 0;) {
    const Layer& l = layers_[li];
    const auto& x = cache.acts[li];
    const double* w = params_.data() + l.w_offset;
    double* gw = grad.data() + l.w_offset;
    double* gb = grad.data() + l.b_offset;
    next_delta.assign(l.in, 0.0);
    for (uint32_t o = 0; o < l.out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      double* grow = gw + static_cast<size_t>(o) * l.in;
      const double* wrow = w + static_cast<size_t>(o) * l.in;
      for (uint32_t i = 0; i < l.in; ++i) {
        grow[i] += d * x[i];
        next_delta[i] += d * wrow[i];
      }
    }
    if (li > 0) {
      // Input of this layer was a tanh output.
      const auto& a = cache.acts[li];
      for (uint32_t i = 0; i < l.in; ++i)
        next_delta[i] *= 1.0 - a[i] * a[i];
    }
    delta.swap(next_delta);
  }
}

MaskedDistribution MaskedDistribution::from_logits(
    std::span<const double> logits, std::span<const uint64_t> mask) {
  MaskedDistribution d;
  const size_t n = logits.size();
  d.prob.assign(n, 0.0);
  d.log_prob.assign(n, 0.0);

  double z_max = -1e300;
  bits::for_each_set(mask, [&](size_t i) {
    if (logits[i] > z_max) z_max = logits[i];
  });
  if (z_max == -1e300)
    throw ValidationError("masked distribution over an empty action set");

  double sum = 0.0;
  bits::for_each_set(mask, [&](size_t i) { sum += std::exp(logits[i] - z_max); });
  const double lse = std::log(sum);

  double entropy = 0.0;
  bits::for_each_set(mask, [&](size_t i) {
    const double lp = logits[i] - z_max - lse;
    d.log_prob[i] = lp;
    d.prob[i] = std::exp(lp);
    entropy -= d.prob[i] * lp;
  });
  d.entropy = entropy;
  return d;
}

uint32_t MaskedDistribution::sample(Rng& rng) const {
  const double u = rng.unit();
  double acc = 0.0;
  uint32_t last = 0;
  for (size_t i = 0; i < prob.size(); ++i) {
    if (prob[i] <= 0.0) continue;
    acc += prob[i];
    last = static_cast<uint32_t>(i);
    if (u < acc) return last;
  }
  return last;  // numerical tail
}

void state_to_obs(std::span<const uint64_t> state, size_t n,
                  std::vector<double>& obs) {
  obs.assign(n, 0.0);
  bits::for_each_set(state, [&](size_t i) {
    if (i < n) obs[i] = 1.0;
  });
}

}  // namespace rarepat
