#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lila/label_space.hpp"

namespace lila::oracle {

/// IoU recounted straight from the label pairs, without a confusion matrix.
inline std::optional<double> recount_iou(const std::vector<std::uint8_t>& prediction,
                                         const std::vector<std::uint8_t>& truth, int cls) {
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == kUnlabeledId) continue;
    const bool t = truth[i] == cls;
    const bool p = prediction[i] == cls;
    if (t && p) ++tp;
    if (!t && p) ++fp;
    if (t && !p) ++fn;
  }
  if (tp + fp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
}

inline std::optional<double> recount_mean_iou(const std::vector<std::uint8_t>& prediction,
                                              const std::vector<std::uint8_t>& truth) {
  double sum = 0.0;
  int n = 0;
  for (int c = 0; c < kNumLidarClasses; ++c) {
    if (c == static_cast<int>(LidarClass::kSky)) continue;
    if (const auto iou = recount_iou(prediction, truth, c)) {
      sum += *iou;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace lila::oracle
