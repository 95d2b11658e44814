#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lila/neural/layers.hpp"

namespace lila::nn {

/// Per-block branch widths plus input/output channel counts.
struct NetworkSpec {
  std::array<int, 5> block_widths{96, 128, 256, 256, 128};
  int in_channels = 2;
  int num_classes = 13;

  static NetworkSpec full() { return {}; }
  /// Desk-scale profile used by tests and the synthetic experiments.
  static NetworkSpec reduced() { return {{8, 12, 16, 16, 12}, 2, 13}; }

  void validate() const;
  bool operator==(const NetworkSpec&) const = default;
};

/// Activations kept by a training-mode block forward for its backward pass.
template <typename T>
struct LilaBlockCache {
  Tensor<T> input;
  Tensor<T> branch_pre[3];
  Tensor<T> concat;  // post-ReLU branch outputs, 3n channels
  Tensor<T> bottleneck_pre;
};

/// Three parallel conv+ReLU branches (7x3, 3x7, 3x3 kernels, height x width),
/// channel concatenation to 3n, then a 1x1 conv+ReLU bottleneck back to n.
template <typename T>
class LilaBlock {
 public:
  LilaBlock() = default;
  LilaBlock(const std::string& name, int in_channels, int width);

  int width() const { return width_; }
  int in_channels() const { return branches_[0].in_channels(); }

  Tensor<T> forward(const Tensor<T>& input, LilaBlockCache<T>* cache) const;
  /// Accumulates parameter gradients; returns the input gradient if requested.
  Tensor<T> backward(const Tensor<T>& grad_out, const LilaBlockCache<T>& cache,
                     bool need_input_grad);

  std::vector<Parameter<T>*> parameters();
  std::vector<const Parameter<T>*> parameters() const;
  std::vector<ConvLayer<T>*> layers();

 private:
  int width_ = 0;
  std::array<ConvLayer<T>, 3> branches_;
  ConvLayer<T> bottleneck_;
};

/// Five LiLaBlocks followed by a 1x1 classifier producing raw logits.
template <typename T>
class LilaNet {
 public:
  explicit LilaNet(const NetworkSpec& spec = NetworkSpec::reduced());

  const NetworkSpec& spec() const { return spec_; }

  /// MSRA kernels, zero biases; layer i draws from derive_seed(seed, i).
  void init_msra(std::uint64_t seed);

  /// Training forward: caches activations for backward(). Throws ShapeMismatch.
  Tensor<T> forward(const Tensor<T>& input);
  /// Inference forward without caching.
  Tensor<T> predict(const Tensor<T>& input) const;
  /// Accumulates gradients of all parameters from d(loss)/d(logits) of the
  /// last forward(); returns d(loss)/d(input).
  Tensor<T> backward(const Tensor<T>& grad_logits);

  void zero_grad();
  std::vector<Parameter<T>*> parameters();
  std::vector<const Parameter<T>*> parameters() const;
  std::size_t parameter_count() const;

  /// Bit pattern of every ReLU gate from the last forward(); gradient checks
  /// use it to detect finite-difference steps that cross a kink.
  std::vector<bool> relu_pattern() const;

  template <typename U>
  LilaNet<U> cast() const {
    LilaNet<U> out(spec_);
    auto src = parameters();
    auto dst = out.parameters();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i]->value = src[i]->value.template cast<U>();
    return out;
  }

 private:
  void check_input(const Tensor<T>& input) const;

  NetworkSpec spec_;
  std::array<LilaBlock<T>, 5> blocks_;
  ConvLayer<T> classifier_;
  std::array<LilaBlockCache<T>, 5> caches_;
  Tensor<T> classifier_input_;
};

}  // namespace lila::nn
