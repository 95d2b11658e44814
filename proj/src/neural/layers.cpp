#include "lila/neural/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Core>

#include "lila/rng.hpp"

namespace lila::nn {

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

int wrap_index(int x, int n) {
  const int r = x % n;
  return r < 0 ? r + n : r;
}

// Lays out every receptive-field tap of one sample as a row of H*W values:
// row (c * kh + dy) * kw + dx holds input[c, y + dy - kh/2, (x + dx - kw/2) mod W].
template <typename T>
void im2col(const T* input, int channels, int height, int width, int kh, int kw, T* col) {
  const int ph = kh / 2;
  const int pw = kw / 2;
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  for (int c = 0; c < channels; ++c) {
    for (int dy = 0; dy < kh; ++dy) {
      for (int dx = 0; dx < kw; ++dx) {
        T* row = col + static_cast<std::size_t>((c * kh + dy) * kw + dx) * plane;
        const int shift = wrap_index(dx - pw, width);
        for (int y = 0; y < height; ++y) {
          T* dst = row + static_cast<std::size_t>(y) * width;
          const int sy = y + dy - ph;
          if (sy < 0 || sy >= height) {
            std::fill(dst, dst + width, T(0));
            continue;
          }
          const T* src = input + (static_cast<std::size_t>(c) * height + sy) * width;
          std::copy(src + shift, src + width, dst);
          std::copy(src, src + shift, dst + (width - shift));
        }
      }
    }
  }
}

// Adjoint of im2col: scatters tap gradients back onto the input plane.
template <typename T>
void col2im(const T* col, int channels, int height, int width, int kh, int kw, T* input_grad) {
  const int ph = kh / 2;
  const int pw = kw / 2;
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  for (int c = 0; c < channels; ++c) {
    for (int dy = 0; dy < kh; ++dy) {
      for (int dx = 0; dx < kw; ++dx) {
        const T* row = col + static_cast<std::size_t>((c * kh + dy) * kw + dx) * plane;
        const int shift = wrap_index(dx - pw, width);
        for (int y = 0; y < height; ++y) {
          const int sy = y + dy - ph;
          if (sy < 0 || sy >= height) continue;
          const T* src = row + static_cast<std::size_t>(y) * width;
          T* dst = input_grad + (static_cast<std::size_t>(c) * height + sy) * width;
          const int head = width - shift;
          for (int x = 0; x < head; ++x) dst[x + shift] += src[x];
          for (int x = head; x < width; ++x) dst[x - head] += src[x];
        }
      }
    }
  }
}

template <typename T>
void check_layer(const ConvLayer<T>& layer) {
  if (layer.kernel_h() % 2 == 0 || layer.kernel_w() % 2 == 0) {
    throw Error(ErrorCode::kShapeMismatch, "convolution kernels must have odd sizes");
  }
  require_shape(layer.bias.value.shape(), {layer.out_channels(), 1, 1, 1}, "conv bias");
}

}  // namespace

template <typename T>
ConvLayer<T>::ConvLayer(const std::string& name, int in_channels, int out_channels, int kernel_h,
                        int kernel_w)
    : kernel(name + ".kernel", {out_channels, in_channels, kernel_h, kernel_w}),
      bias(name + ".bias", {out_channels, 1, 1, 1}) {
  if (in_channels <= 0 || out_channels <= 0 || kernel_h % 2 == 0 || kernel_w % 2 == 0 ||
      kernel_h < 1 || kernel_w < 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "invalid convolution " + name + ": channels must be positive, kernels odd");
  }
}

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& input, const ConvLayer<T>& layer) {
  check_layer(layer);
  if (input.channels() != layer.in_channels()) {
    throw Error(ErrorCode::kShapeMismatch,
                "conv input has " + std::to_string(input.channels()) + " channels, layer " +
                    layer.kernel.name + " expects " + std::to_string(layer.in_channels()));
  }
  if (input.height() < 1 || input.width() < 1) {
    throw Error(ErrorCode::kShapeMismatch, "conv input spatial dims must be >= 1");
  }
  const int n_batch = input.batch();
  const int h = input.height();
  const int w = input.width();
  const int out_ch = layer.out_channels();
  const int taps = layer.in_channels() * layer.kernel_h() * layer.kernel_w();
  const Eigen::Index plane = static_cast<Eigen::Index>(h) * w;
  const bool pointwise = layer.kernel_h() == 1 && layer.kernel_w() == 1;

  Tensor<T> out({n_batch, out_ch, h, w});
  ConstMatrixMap<T> kernel(layer.kernel.value.data().data(), out_ch, taps);
  const Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> bias(layer.bias.value.data().data(),
                                                                   out_ch);
  AlignedVector<T> col_buffer(pointwise ? 0 : static_cast<std::size_t>(taps) * plane);
  for (int n = 0; n < n_batch; ++n) {
    const T* col_data = input.plane(n, 0);
    if (!pointwise) {
      im2col(input.plane(n, 0), layer.in_channels(), h, w, layer.kernel_h(), layer.kernel_w(),
             col_buffer.data());
      col_data = col_buffer.data();
    }
    ConstMatrixMap<T> col(col_data, taps, plane);
    MatrixMap<T> result(out.plane(n, 0), out_ch, plane);
    result.noalias() = kernel * col;
    result.colwise() += bias;
  }
  return out;
}

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& grad_out, const Tensor<T>& input,
                             const ConvLayer<T>& layer, bool need_input_grad) {
  check_layer(layer);
  const int n_batch = input.batch();
  const int h = input.height();
  const int w = input.width();
  const int out_ch = layer.out_channels();
  require_shape(input.shape(), {n_batch, layer.in_channels(), h, w}, "conv backward input");
  require_shape(grad_out.shape(), {n_batch, out_ch, h, w}, "conv backward grad_out");

  const int taps = layer.in_channels() * layer.kernel_h() * layer.kernel_w();
  const Eigen::Index plane = static_cast<Eigen::Index>(h) * w;
  const bool pointwise = layer.kernel_h() == 1 && layer.kernel_w() == 1;

  ConvGrads<T> grads;
  grads.kernel = Tensor<T>(layer.kernel.value.shape());
  grads.bias = Tensor<T>(layer.bias.value.shape());
  if (need_input_grad) grads.input = Tensor<T>(input.shape());

  ConstMatrixMap<T> kernel(layer.kernel.value.data().data(), out_ch, taps);
  MatrixMap<T> grad_kernel(grads.kernel.data().data(), out_ch, taps);
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> grad_bias(grads.bias.data().data(), out_ch);

  AlignedVector<T> col_buffer(pointwise ? 0 : static_cast<std::size_t>(taps) * plane);
  AlignedVector<T> grad_col_buffer(pointwise || !need_input_grad
                                     ? 0
                                     : static_cast<std::size_t>(taps) * plane);
  for (int n = 0; n < n_batch; ++n) {
    ConstMatrixMap<T> g(grad_out.plane(n, 0), out_ch, plane);
    const T* col_data = input.plane(n, 0);
    if (!pointwise) {
      im2col(input.plane(n, 0), layer.in_channels(), h, w, layer.kernel_h(), layer.kernel_w(),
             col_buffer.data());
      col_data = col_buffer.data();
    }
    ConstMatrixMap<T> col(col_data, taps, plane);
    grad_kernel.noalias() += g * col.transpose();
    grad_bias += g.rowwise().sum();
    if (!need_input_grad) continue;
    if (pointwise) {
      MatrixMap<T> grad_in(grads.input.plane(n, 0), taps, plane);
      grad_in.noalias() = kernel.transpose() * g;
    } else {
      MatrixMap<T> grad_col(grad_col_buffer.data(), taps, plane);
      grad_col.noalias() = kernel.transpose() * g;
      col2im(grad_col_buffer.data(), layer.in_channels(), h, w, layer.kernel_h(),
             layer.kernel_w(), grads.input.plane(n, 0));
    }
  }
  return grads;
}

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& input) {
  Tensor<T> out(input.shape());
  auto src = input.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > T(0) ? src[i] : T(0);
  return out;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& grad_out, const Tensor<T>& input) {
  require_shape(grad_out.shape(), input.shape(), "relu backward");
  Tensor<T> out(input.shape());
  auto g = grad_out.data();
  auto x = input.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] = x[i] > T(0) ? g[i] : T(0);
  return out;
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b, const Tensor<T>& c) {
  for (const Tensor<T>* t : {&b, &c}) {
    if (t->batch() != a.batch() || t->height() != a.height() || t->width() != a.width()) {
      throw Error(ErrorCode::kShapeMismatch, "concat inputs differ in batch or spatial size: " +
                                                 shape_string(a.shape()) + " vs " +
                                                 shape_string(t->shape()));
    }
  }
  const int total = a.channels() + b.channels() + c.channels();
  Tensor<T> out({a.batch(), total, a.height(), a.width()});
  const std::size_t plane = a.plane_size();
  for (int n = 0; n < a.batch(); ++n) {
    T* dst = out.plane(n, 0);
    for (const Tensor<T>* t : {&a, &b, &c}) {
      const std::size_t count = static_cast<std::size_t>(t->channels()) * plane;
      if (count == 0) continue;
      std::copy_n(t->plane(n, 0), count, dst);
      dst += count;
    }
  }
  return out;
}

template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& t, const std::vector<int>& widths) {
  const int total = std::accumulate(widths.begin(), widths.end(), 0);
  if (total != t.channels()) {
    throw Error(ErrorCode::kShapeMismatch, "split widths sum to " + std::to_string(total) +
                                               ", tensor has " + std::to_string(t.channels()));
  }
  std::vector<Tensor<T>> parts;
  const std::size_t plane = t.plane_size();
  int first = 0;
  for (const int width : widths) {
    Tensor<T> part({t.batch(), width, t.height(), t.width()});
    for (int n = 0; n < t.batch() && width > 0; ++n) {
      std::copy_n(t.plane(n, first), static_cast<std::size_t>(width) * plane, part.plane(n, 0));
    }
    parts.push_back(std::move(part));
    first += width;
  }
  return parts;
}

template <typename T>
Tensor<T> msra_init(const Shape& kernel_shape, std::uint64_t seed) {
  Tensor<T> kernel(kernel_shape);
  const int fan_in = kernel_shape[1] * kernel_shape[2] * kernel_shape[3];
  if (fan_in <= 0) throw Error(ErrorCode::kShapeMismatch, "MSRA init needs positive fan-in");
  const double stddev = std::sqrt(2.0 / fan_in);
  Rng rng(seed);
  for (T& v : kernel.data()) v = static_cast<T>(stddev * rng.normal());
  return kernel;
}

#define LILA_INSTANTIATE_LAYERS(T)                                                             \
  template struct ConvLayer<T>;                                                                \
  template Tensor<T> conv2d_forward(const Tensor<T>&, const ConvLayer<T>&);                   \
  template ConvGrads<T> conv2d_backward(const Tensor<T>&, const Tensor<T>&,                   \
                                        const ConvLayer<T>&, bool);                           \
  template Tensor<T> relu_forward(const Tensor<T>&);                                           \
  template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> concat_channels(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);    \
  template std::vector<Tensor<T>> split_channels(const Tensor<T>&, const std::vector<int>&);  \
  template Tensor<T> msra_init<T>(const Shape&, std::uint64_t);

LILA_INSTANTIATE_LAYERS(float)
LILA_INSTANTIATE_LAYERS(double)

}  // namespace lila::nn
