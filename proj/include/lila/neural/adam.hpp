#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lila/neural/layers.hpp"

namespace lila::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamMoments {
  std::vector<T> first;
  std::vector<T> second;
};

/// One bias-corrected Adam update of `params` in place; `step` is the
/// 1-based update count t. Throws ShapeMismatch on length mismatch.
template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamMoments<T>& moments,
               std::int64_t step, const AdamConfig& config);

/// Adam over a fixed parameter list; moments start at zero.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Parameter<T>*> params, AdamConfig config);

  void step();
  std::int64_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

 private:
  std::vector<Parameter<T>*> params_;
  std::vector<AdamMoments<T>> moments_;
  AdamConfig config_;
  std::int64_t steps_ = 0;
};

}  // namespace lila::nn
