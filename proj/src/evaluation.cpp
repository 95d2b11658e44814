#include "lila/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "lila/error.hpp"

namespace lila {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts_) {
    for (const auto c : row) sum += c;
  }
  for (const auto m : missed_) sum += m;
  return sum;
}

void ConfusionMatrix::add(int truth, int predicted, std::uint64_t n) {
  if (truth < 0 || truth >= kClasses) {
    throw Error(ErrorCode::kUnknownLabelId, "truth id " + std::to_string(truth));
  }
  if (predicted == kUnlabeledId) {
    missed_[static_cast<std::size_t>(truth)] += n;
    return;
  }
  if (predicted < 0 || predicted >= kClasses) {
    throw Error(ErrorCode::kUnknownLabelId, "prediction id " + std::to_string(predicted));
  }
  counts_[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)] += n;
}

void ConfusionMatrix::accumulate(std::span<const std::uint8_t> prediction,
                                 std::span<const std::uint8_t> truth) {
  if (prediction.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(prediction.size()) +
                                                " predictions vs " + std::to_string(truth.size()) +
                                                " truth labels");
  }
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == kUnlabeledId) continue;
    add(truth[i], prediction[i]);
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t g = 0; g < kClasses; ++g) {
    for (std::size_t p = 0; p < kClasses; ++p) counts_[g][p] += other.counts_[g][p];
    missed_[g] += other.missed_[g];
  }
  return *this;
}

std::optional<double> class_iou(const ConfusionMatrix& cm, int cls) {
  std::uint64_t row = cm.missed(cls);
  std::uint64_t col = 0;
  for (int k = 0; k < ConfusionMatrix::kClasses; ++k) {
    row += cm.count(cls, k);
    col += cm.count(k, cls);
  }
  const std::uint64_t tp = cm.count(cls, cls);
  const std::uint64_t denom = tp + (col - tp) + (row - tp);
  if (denom == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(denom);
}

bool is_evaluated_class(int cls) {
  return cls >= 0 && cls < kNumLidarClasses && cls != id_of(LidarClass::kSky);
}

double mean_iou(const ConfusionMatrix& cm) {
  double sum = 0.0;
  int defined = 0;
  for (int c = 0; c < ConfusionMatrix::kClasses; ++c) {
    if (!is_evaluated_class(c)) continue;
    if (const auto iou = class_iou(cm, c)) {
      sum += *iou;
      ++defined;
    }
  }
  if (defined == 0) throw Error(ErrorCode::kAllUndefined, "no evaluated class has defined IoU");
  return sum / defined;
}

double pixel_accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) return 0.0;
  std::uint64_t diag = 0;
  for (int c = 0; c < ConfusionMatrix::kClasses; ++c) diag += cm.count(c, c);
  return static_cast<double>(diag) / static_cast<double>(total);
}

nlohmann::json iou_report_json(const ConfusionMatrix& cm) {
  nlohmann::json report;
  nlohmann::json per_class = nlohmann::json::object();
  nlohmann::json matrix = nlohmann::json::array();
  nlohmann::json missed = nlohmann::json::array();
  for (int g = 0; g < ConfusionMatrix::kClasses; ++g) {
    const auto name = std::string(class_name(static_cast<LidarClass>(g)));
    const auto iou = class_iou(cm, g);
    per_class[name] = iou ? nlohmann::json(*iou) : nlohmann::json(nullptr);
    nlohmann::json row = nlohmann::json::array();
    for (int p = 0; p < ConfusionMatrix::kClasses; ++p) row.push_back(cm.count(g, p));
    matrix.push_back(row);
    missed.push_back(cm.missed(g));
  }
  report["class_iou"] = per_class;
  try {
    report["mean_iou"] = mean_iou(cm);
  } catch (const Error&) {
    report["mean_iou"] = nullptr;
  }
  report["pixel_accuracy"] = pixel_accuracy(cm);
  report["samples"] = cm.total();
  report["confusion_matrix"] = matrix;
  report["missed"] = missed;
  return report;
}

std::string iou_report_table(const ConfusionMatrix& cm, const std::string& row_label) {
  std::vector<std::string> headers;
  std::vector<std::string> values;
  for (int c = 0; c < ConfusionMatrix::kClasses; ++c) {
    if (!is_evaluated_class(c)) continue;
    headers.emplace_back(class_name(static_cast<LidarClass>(c)));
    const auto iou = class_iou(cm, c);
    char buf[32];
    if (iou) {
      std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * *iou);
    } else {
      std::snprintf(buf, sizeof(buf), "-");
    }
    values.emplace_back(buf);
  }
  headers.emplace_back("mean IoU");
  try {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * mean_iou(cm));
    values.emplace_back(buf);
  } catch (const Error&) {
    values.emplace_back("-");
  }

  std::size_t label_width = std::max<std::size_t>(row_label.size(), 1);
  std::ostringstream out;
  out << std::string(label_width, ' ');
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const std::size_t w = std::max(headers[i].size(), values[i].size());
    out << " | " << std::string(w - headers[i].size(), ' ') << headers[i];
  }
  out << '\n' << row_label << std::string(label_width - row_label.size(), ' ');
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const std::size_t w = std::max(headers[i].size(), values[i].size());
    out << " | " << std::string(w - values[i].size(), ' ') << values[i];
  }
  out << '\n';
  return out.str();
}

}  // namespace lila
