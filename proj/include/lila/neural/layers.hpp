#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lila/neural/tensor.hpp"

namespace lila::nn {

/// Trainable tensor plus its accumulated gradient.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string n, const Shape& shape) : name(std::move(n)), value(shape), grad(shape) {}
  void zero_grad() { grad.fill(T(0)); }
};

/// Stride-1 convolution with odd kernel sizes. Padding keeps the spatial
/// size: zeros above and below, circular wrap left and right.
template <typename T>
struct ConvLayer {
  Parameter<T> kernel;  // (out, in, kh, kw)
  Parameter<T> bias;    // (out, 1, 1, 1)

  ConvLayer() = default;
  ConvLayer(const std::string& name, int in_channels, int out_channels, int kernel_h,
            int kernel_w);

  int out_channels() const { return kernel.value.batch(); }
  int in_channels() const { return kernel.value.channels(); }
  int kernel_h() const { return kernel.value.height(); }
  int kernel_w() const { return kernel.value.width(); }
};

template <typename T>
struct ConvGrads {
  Tensor<T> input;  // empty when not requested
  Tensor<T> kernel;
  Tensor<T> bias;
};

/// Throws ShapeMismatch when input channels do not match the layer.
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& input, const ConvLayer<T>& layer);

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& grad_out, const Tensor<T>& input,
                             const ConvLayer<T>& layer, bool need_input_grad = true);

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& input);

/// Passes the gradient where the forward input was strictly positive.
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& grad_out, const Tensor<T>& input);

/// Channel-wise concatenation in argument order. Throws ShapeMismatch when
/// batch or spatial sizes differ.
template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b, const Tensor<T>& c);

/// Splits `t` along channels into consecutive pieces of the given widths.
template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& t, const std::vector<int>& widths);

/// Zero-mean normal kernel entries with variance 2 / (in * kh * kw).
template <typename T>
Tensor<T> msra_init(const Shape& kernel_shape, std::uint64_t seed);

}  // namespace lila::nn
