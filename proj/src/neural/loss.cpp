#include "lila/neural/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace lila::nn {

template <typename T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> targets,
                                    std::uint8_t ignore_id) {
  const int n_batch = logits.batch();
  const int classes = logits.channels();
  const std::size_t plane = logits.plane_size();
  if (targets.size() != static_cast<std::size_t>(n_batch) * plane) {
    throw Error(ErrorCode::kShapeMismatch,
                "targets hold " + std::to_string(targets.size()) + " pixels, logits " +
                    shape_string(logits.shape()));
  }
  LossResult<T> result;
  result.grad_logits = Tensor<T>(logits.shape());
  for (const std::uint8_t t : targets) {
    if (t == ignore_id) continue;
    if (t >= classes) {
      throw Error(ErrorCode::kUnknownLabelId, "target id " + std::to_string(t) +
                                                  " outside " + std::to_string(classes) +
                                                  " classes");
    }
    ++result.counted;
  }
  if (result.counted == 0) return result;

  const double scale = 1.0 / static_cast<double>(result.counted);
  std::vector<double> prob(static_cast<std::size_t>(classes));
  double total = 0.0;
  for (int n = 0; n < n_batch; ++n) {
    for (std::size_t px = 0; px < plane; ++px) {
      const std::uint8_t target = targets[static_cast<std::size_t>(n) * plane + px];
      if (target == ignore_id) continue;
      double max_logit = -INFINITY;
      for (int c = 0; c < classes; ++c) {
        max_logit = std::max(max_logit, static_cast<double>(logits.plane(n, c)[px]));
      }
      double sum = 0.0;
      for (int c = 0; c < classes; ++c) {
        prob[static_cast<std::size_t>(c)] =
            std::exp(static_cast<double>(logits.plane(n, c)[px]) - max_logit);
        sum += prob[static_cast<std::size_t>(c)];
      }
      const double log_sum = std::log(sum) + max_logit;
      total += log_sum - static_cast<double>(logits.plane(n, target)[px]);
      for (int c = 0; c < classes; ++c) {
        const double p = prob[static_cast<std::size_t>(c)] / sum;
        const double onehot = c == target ? 1.0 : 0.0;
        result.grad_logits.plane(n, c)[px] = static_cast<T>((p - onehot) * scale);
      }
    }
  }
  result.loss = total * scale;
  return result;
}

template LossResult<float> softmax_cross_entropy(const Tensor<float>&,
                                                 std::span<const std::uint8_t>, std::uint8_t);
template LossResult<double> softmax_cross_entropy(const Tensor<double>&,
                                                  std::span<const std::uint8_t>, std::uint8_t);

}  // namespace lila::nn
