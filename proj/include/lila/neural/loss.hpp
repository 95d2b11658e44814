#pragma once

#include <cstdint>
#include <span>

#include "lila/neural/tensor.hpp"

namespace lila::nn {

template <typename T>
struct LossResult {
  double loss = 0.0;
  Tensor<T> grad_logits;
  std::size_t counted = 0;  // pixels that contributed
};

/// Mean per-pixel softmax cross-entropy over pixels whose target is not
/// `ignore_id`. `targets` is laid out (batch, height, width). Ignored pixels
/// contribute neither loss nor gradient; all-ignored input yields loss 0.
/// Throws ShapeMismatch on size mismatch and UnknownLabelId on targets
/// outside [0, classes).
template <typename T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> targets,
                                    std::uint8_t ignore_id = 255);

}  // namespace lila::nn
