#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "lila/label_space.hpp"

namespace lila {

/// counts(g, p): samples with ground truth g predicted as p. Predictions of
/// UNLABELED for a labeled sample are kept per truth class in `missed` and
/// count as false negatives.
class ConfusionMatrix {
 public:
  static constexpr int kClasses = kNumLidarClasses;

  std::uint64_t count(int truth, int predicted) const {
    return counts_[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
  }
  std::uint64_t missed(int truth) const { return missed_[static_cast<std::size_t>(truth)]; }
  std::uint64_t total() const;

  /// Adds every (prediction, truth) pair whose truth is not UNLABELED.
  /// Throws LengthMismatch on size mismatch, UnknownLabelId on foreign ids.
  void accumulate(std::span<const std::uint8_t> prediction, std::span<const std::uint8_t> truth);
  void add(int truth, int predicted, std::uint64_t n = 1);

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::array<std::array<std::uint64_t, kClasses>, kClasses> counts_{};
  std::array<std::uint64_t, kClasses> missed_{};
};

/// TP / (TP + FP + FN); nullopt when the denominator is zero.
std::optional<double> class_iou(const ConfusionMatrix& cm, int cls);

/// Classes that enter the mean: all semantic classes except sky.
bool is_evaluated_class(int cls);

/// Mean over evaluated classes with defined IoU. Throws AllUndefined.
double mean_iou(const ConfusionMatrix& cm);

/// Fraction of samples on the diagonal.
double pixel_accuracy(const ConfusionMatrix& cm);

nlohmann::json iou_report_json(const ConfusionMatrix& cm);
/// Aligned table: one header row of class names, one row of percentages.
std::string iou_report_table(const ConfusionMatrix& cm, const std::string& row_label);

}  // namespace lila
