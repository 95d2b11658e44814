#include "lila/neural/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lila/neural/loss.hpp"
#include "lila/rng.hpp"

namespace lila::nn {

Tensor<float> encode_image(const LidarImage& image) {
  Tensor<float> input({1, 2, image.rows, image.cols});
  float* depth = input.plane(0, 0);
  float* refl = input.plane(0, 1);
  for (std::size_t i = 0; i < image.size(); ++i) {
    depth[i] = image.valid[i] ? image.depth[i] / kDepthNormalizationM : 0.0f;
    refl[i] = image.valid[i] ? image.reflectivity[i] : 0.0f;
  }
  return input;
}

std::vector<std::uint8_t> cell_labels(const LidarImage& image,
                                      std::span<const std::uint8_t> point_labels) {
  std::vector<std::uint8_t> out(image.size(), kUnlabeledId);
  for (std::size_t i = 0; i < image.size(); ++i) {
    const std::int32_t idx = image.point_index[i];
    if (idx < 0) continue;
    if (static_cast<std::size_t>(idx) >= point_labels.size()) {
      throw Error(ErrorCode::kLengthMismatch, "point labels shorter than the scan");
    }
    out[i] = point_labels[static_cast<std::size_t>(idx)];
  }
  return out;
}

TrainingSample make_training_sample(const LidarScan& scan,
                                    std::span<const std::uint8_t> point_labels) {
  if (point_labels.size() != scan.points.size()) {
    throw Error(ErrorCode::kLengthMismatch, "need one label per scan point");
  }
  const LidarImage image = scan_to_image(scan);
  return {encode_image(image), cell_labels(image, point_labels)};
}

TrainResult train(std::span<const TrainingSample> data, const TrainConfig& config,
                  std::optional<LilaNet<float>> warm_start, const TrainCallback& callback) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "training set is empty");
  if (config.batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  if (config.iterations < 0) throw Error(ErrorCode::kInvalidArgument, "negative iterations");
  const Shape sample_shape = data.front().input.shape();
  const int h = sample_shape[2];
  const int w = sample_shape[3];
  const std::size_t plane = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  for (const TrainingSample& s : data) {
    require_shape(s.input.shape(), {1, sample_shape[1], h, w}, "training sample");
    if (s.target.size() != plane) {
      throw Error(ErrorCode::kShapeMismatch, "training target size does not match its input");
    }
  }

  TrainResult result{warm_start ? std::move(*warm_start) : LilaNet<float>(config.spec), {}};
  if (!warm_start) result.net.init_msra(config.seed);
  if (config.iterations == 0) return result;

  LilaNet<float>& net = result.net;
  Adam<float> adam(net.parameters(), AdamConfig{config.learning_rate});
  Rng rng(derive_seed(config.seed, 0x5a3c9e));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order.begin(), order.end());
  std::size_t cursor = 0;

  const int batch = config.batch_size;
  const int channels = sample_shape[1];
  Tensor<float> inputs({batch, channels, h, w});
  std::vector<std::uint8_t> targets(static_cast<std::size_t>(batch) * plane);
  result.loss_trace.reserve(static_cast<std::size_t>(config.iterations));

  for (int it = 1; it <= config.iterations; ++it) {
    for (int b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        rng.shuffle(order.begin(), order.end());
        cursor = 0;
      }
      const TrainingSample& s = data[order[cursor++]];
      std::copy_n(s.input.plane(0, 0), static_cast<std::size_t>(channels) * plane,
                  inputs.plane(b, 0));
      std::copy(s.target.begin(), s.target.end(),
                targets.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(b) * plane));
    }
    net.zero_grad();
    const Tensor<float> logits = net.forward(inputs);
    const LossResult<float> loss = softmax_cross_entropy(logits, targets);
    net.backward(loss.grad_logits);
    adam.step();
    result.loss_trace.push_back(loss.loss);
    if (callback && !callback(it, net, loss.loss)) break;
  }
  return result;
}

Prediction argmax_labels(const Tensor<float>& logits, std::span<const std::uint8_t> valid) {
  const int h = logits.height();
  const int w = logits.width();
  const int classes = logits.channels();
  const std::size_t plane = logits.plane_size();
  if (!valid.empty() && valid.size() != plane) {
    throw Error(ErrorCode::kShapeMismatch, "validity mask does not match logits");
  }
  Prediction out{LabelImage(h, w, LabelSet::kLidar, kUnlabeledId),
                 std::vector<float>(plane, 0.0f)};
  for (std::size_t px = 0; px < plane; ++px) {
    if (!valid.empty() && !valid[px]) continue;
    int best = 0;
    float best_logit = logits.plane(0, 0)[px];
    for (int c = 1; c < classes; ++c) {
      const float v = logits.plane(0, c)[px];
      if (v > best_logit) {
        best = c;
        best_logit = v;
      }
    }
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) {
      sum += std::exp(static_cast<double>(logits.plane(0, c)[px]) - best_logit);
    }
    out.labels.ids[px] = static_cast<std::uint8_t>(best);
    out.confidence[px] = static_cast<float>(1.0 / sum);
  }
  return out;
}

Prediction infer(const LilaNet<float>& net, const Tensor<float>& input,
                 std::span<const std::uint8_t> valid) {
  if (input.batch() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "infer expects a single image, got " +
                                               shape_string(input.shape()));
  }
  return argmax_labels(net.predict(input), valid);
}

}  // namespace lila::nn
