#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lila/label_space.hpp"
#include "lila/neural/adam.hpp"
#include "lila/neural/lilanet.hpp"
#include "lila/scan_projection.hpp"

namespace lila::nn {

/// Depth is divided by this before entering the network.
inline constexpr float kDepthNormalizationM = 20.0f;

/// (1, 2, H, W) network input: normalized depth, reflectivity. Invalid cells
/// are already zero in both channels.
Tensor<float> encode_image(const LidarImage& image);

struct TrainingSample {
  Tensor<float> input;                // (1, 2, H, W)
  std::vector<std::uint8_t> target;   // H * W LidarClass ids, 255 = ignore
};

/// Per-cell labels taken from the point that won each cell; UNLABELED where
/// the cell is empty. Throws LengthMismatch if `point_labels` does not hold
/// one entry per scan point.
std::vector<std::uint8_t> cell_labels(const LidarImage& image,
                                      std::span<const std::uint8_t> point_labels);

TrainingSample make_training_sample(const LidarScan& scan,
                                    std::span<const std::uint8_t> point_labels);

struct TrainConfig {
  NetworkSpec spec = NetworkSpec::reduced();
  double learning_rate = 1e-3;
  int batch_size = 5;
  std::uint64_t seed = 0;
  int iterations = 0;
};

/// Called after each iteration with (1-based iteration, net, loss); return
/// false to stop early.
using TrainCallback = std::function<bool(int, const LilaNet<float>&, double)>;

struct TrainResult {
  LilaNet<float> net;
  std::vector<double> loss_trace;
};

/// Minibatch Adam training. Batches are drawn from a seeded per-epoch
/// shuffle of `data`. Without `warm_start` the net is MSRA-initialized from
/// `config.seed`. Throws EmptyDataset, ShapeMismatch for unequal sample sizes.
TrainResult train(std::span<const TrainingSample> data, const TrainConfig& config,
                  std::optional<LilaNet<float>> warm_start = std::nullopt,
                  const TrainCallback& callback = {});

struct Prediction {
  LabelImage labels;             // LidarClass ids, UNLABELED on invalid cells
  std::vector<float> confidence; // softmax probability of the chosen class
};

/// Per-pixel argmax (lowest id on ties); cells with `valid` false become
/// UNLABELED. `valid` may be empty to keep every cell.
Prediction infer(const LilaNet<float>& net, const Tensor<float>& input,
                 std::span<const std::uint8_t> valid);

/// argmax over logits of sample 0, ties to the lower class id.
Prediction argmax_labels(const Tensor<float>& logits, std::span<const std::uint8_t> valid);

}  // namespace lila::nn
