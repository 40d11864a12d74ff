#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rarepat/bitops.hpp"
#include "rarepat/rng.hpp"

namespace rarepat {

/// Fully-connected network with tanh hidden layers and a linear output,
/// parameters in one flat vector (row-major weights then biases per layer).
/// Double precision throughout so analytic gradients can be checked against
/// central finite differences.
class Mlp {
 public:
  Mlp(uint32_t n_in, std::vector<uint32_t> hidden, uint32_t n_out);

  size_t param_count() const { return n_params_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  /// Xavier-uniform init; output layer scaled down so initial policies are
  /// close to uniform.
  void init(Rng& rng, double out_scale = 1.0);

  struct Cache {
    std::vector<std::vector<double>> acts;  // acts[0] = input, last = output
  };

  void forward(std::span<const double> input, Cache& cache) const;
  std::span<const double> output(const Cache& cache) const {
    return cache.acts.back();
  }

  /// Accumulates parameter gradients into grad (same layout as params) and
  /// returns nothing; d_output is the loss gradient w.r.t. the output.
  void backward(const Cache& cache, std::span<const double> d_output,
                std::span<double> grad) const;

  uint32_t n_in() const { return n_in_; }
  uint32_t n_out() const { return n_out_; }
  const std::vector<uint32_t>& hidden() const { return hidden_; }

 private:
  struct Layer {
    size_t w_offset;
    size_t b_offset;
    uint32_t in;
    uint32_t out;
  };

  uint32_t n_in_;
  uint32_t n_out_;
  std::vector<uint32_t> hidden_;
  std::vector<Layer> layers_;
  size_t n_params_;
  std::vector<double> params_;
};

/// Probabilities over the permitted actions only; masked entries are
/// exactly zero. Returns log-sum-exp internals needed for gradients.
struct MaskedDistribution {
  std::vector<double> prob;      // zero off-mask
  std::vector<double> log_prob;  // valid on-mask only
  double entropy = 0.0;

  static MaskedDistribution from_logits(std::span<const double> logits,
                                        std::span<const uint64_t> mask);

  uint32_t sample(Rng& rng) const;
};

/// Converts a state bit-vector into a 0/1 observation vector.
void state_to_obs(std::span<const uint64_t> state, size_t n,
                  std::vector<double>& obs);

}  // namespace rarepat
