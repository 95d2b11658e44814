#include "lila/neural/lilanet.hpp"

#include <string>

#include "lila/rng.hpp"

namespace lila::nn {

namespace {
constexpr int kBranchKernels[3][2] = {{7, 3}, {3, 7}, {3, 3}};
constexpr const char* kBranchNames[3] = {"branch7x3", "branch3x7", "branch3x3"};

template <typename T>
void accumulate(Parameter<T>& p, const Tensor<T>& grad) {
  auto dst = p.grad.data();
  auto src = grad.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

template <typename T>
void add_into(Tensor<T>& acc, const Tensor<T>& t) {
  auto dst = acc.data();
  auto src = t.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}
}  // namespace

void NetworkSpec::validate() const {
  for (const int w : block_widths) {
    if (w <= 0) throw Error(ErrorCode::kInvalidArgument, "block widths must be positive");
  }
  if (in_channels <= 0 || num_classes <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "channel counts must be positive");
  }
}

template <typename T>
LilaBlock<T>::LilaBlock(const std::string& name, int in_channels, int width) : width_(width) {
  for (int b = 0; b < 3; ++b) {
    branches_[static_cast<std::size_t>(b)] =
        ConvLayer<T>(name + "." + kBranchNames[b], in_channels, width, kBranchKernels[b][0],
                     kBranchKernels[b][1]);
  }
  bottleneck_ = ConvLayer<T>(name + ".bottleneck", 3 * width, width, 1, 1);
}

template <typename T>
Tensor<T> LilaBlock<T>::forward(const Tensor<T>& input, LilaBlockCache<T>* cache) const {
  Tensor<T> pre[3];
  Tensor<T> post[3];
  for (int b = 0; b < 3; ++b) {
    pre[b] = conv2d_forward(input, branches_[static_cast<std::size_t>(b)]);
    post[b] = relu_forward(pre[b]);
  }
  Tensor<T> concat = concat_channels(post[0], post[1], post[2]);
  Tensor<T> bottleneck_pre = conv2d_forward(concat, bottleneck_);
  Tensor<T> out = relu_forward(bottleneck_pre);
  if (cache != nullptr) {
    cache->input = input;
    for (int b = 0; b < 3; ++b) cache->branch_pre[b] = std::move(pre[b]);
    cache->concat = std::move(concat);
    cache->bottleneck_pre = std::move(bottleneck_pre);
  }
  return out;
}

template <typename T>
Tensor<T> LilaBlock<T>::backward(const Tensor<T>& grad_out, const LilaBlockCache<T>& cache,
                                 bool need_input_grad) {
  const Tensor<T> grad_bottleneck_pre = relu_backward(grad_out, cache.bottleneck_pre);
  ConvGrads<T> bottleneck = conv2d_backward(grad_bottleneck_pre, cache.concat, bottleneck_, true);
  accumulate(bottleneck_.kernel, bottleneck.kernel);
  accumulate(bottleneck_.bias, bottleneck.bias);

  const auto grad_post = split_channels(bottleneck.input, {width_, width_, width_});
  Tensor<T> grad_input;
  if (need_input_grad) grad_input = Tensor<T>(cache.input.shape());
  for (int b = 0; b < 3; ++b) {
    auto& layer = branches_[static_cast<std::size_t>(b)];
    const Tensor<T> grad_pre = relu_backward(grad_post[static_cast<std::size_t>(b)],
                                             cache.branch_pre[b]);
    ConvGrads<T> g = conv2d_backward(grad_pre, cache.input, layer, need_input_grad);
    accumulate(layer.kernel, g.kernel);
    accumulate(layer.bias, g.bias);
    if (need_input_grad) add_into(grad_input, g.input);
  }
  return grad_input;
}

template <typename T>
std::vector<Parameter<T>*> LilaBlock<T>::parameters() {
  std::vector<Parameter<T>*> out;
  for (auto& layer : branches_) {
    out.push_back(&layer.kernel);
    out.push_back(&layer.bias);
  }
  out.push_back(&bottleneck_.kernel);
  out.push_back(&bottleneck_.bias);
  return out;
}

template <typename T>
std::vector<const Parameter<T>*> LilaBlock<T>::parameters() const {
  std::vector<const Parameter<T>*> out;
  for (const auto& layer : branches_) {
    out.push_back(&layer.kernel);
    out.push_back(&layer.bias);
  }
  out.push_back(&bottleneck_.kernel);
  out.push_back(&bottleneck_.bias);
  return out;
}

template <typename T>
std::vector<ConvLayer<T>*> LilaBlock<T>::layers() {
  return {&branches_[0], &branches_[1], &branches_[2], &bottleneck_};
}

template <typename T>
LilaNet<T>::LilaNet(const NetworkSpec& spec) : spec_(spec) {
  spec_.validate();
  int in = spec_.in_channels;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    blocks_[i] = LilaBlock<T>("block" + std::to_string(i), in, spec_.block_widths[i]);
    in = spec_.block_widths[i];
  }
  classifier_ = ConvLayer<T>("classifier", in, spec_.num_classes, 1, 1);
}

template <typename T>
void LilaNet<T>::init_msra(std::uint64_t seed) {
  std::uint64_t index = 0;
  auto init_layer = [&](ConvLayer<T>& layer) {
    layer.kernel.value = msra_init<T>(layer.kernel.value.shape(), derive_seed(seed, index++));
    layer.bias.value.fill(T(0));
  };
  for (auto& block : blocks_) {
    for (ConvLayer<T>* layer : block.layers()) init_layer(*layer);
  }
  init_layer(classifier_);
}

template <typename T>
void LilaNet<T>::check_input(const Tensor<T>& input) const {
  if (input.channels() != spec_.in_channels) {
    throw Error(ErrorCode::kShapeMismatch, "network expects " +
                                               std::to_string(spec_.in_channels) +
                                               " input channels, got " +
                                               shape_string(input.shape()));
  }
}

template <typename T>
Tensor<T> LilaNet<T>::forward(const Tensor<T>& input) {
  check_input(input);
  Tensor<T> x = input;
  for (std::size_t i = 0; i < blocks_.size(); ++i) x = blocks_[i].forward(x, &caches_[i]);
  classifier_input_ = x;
  return conv2d_forward(x, classifier_);
}

template <typename T>
Tensor<T> LilaNet<T>::predict(const Tensor<T>& input) const {
  check_input(input);
  Tensor<T> x = input;
  for (const auto& block : blocks_) x = block.forward(x, nullptr);
  return conv2d_forward(x, classifier_);
}

template <typename T>
Tensor<T> LilaNet<T>::backward(const Tensor<T>& grad_logits) {
  if (classifier_input_.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "backward() called before forward()");
  }
  ConvGrads<T> head = conv2d_backward(grad_logits, classifier_input_, classifier_, true);
  accumulate(classifier_.kernel, head.kernel);
  accumulate(classifier_.bias, head.bias);
  Tensor<T> g = std::move(head.input);
  for (std::size_t i = blocks_.size(); i-- > 0;) g = blocks_[i].backward(g, caches_[i], true);
  return g;
}

template <typename T>
void LilaNet<T>::zero_grad() {
  for (Parameter<T>* p : parameters()) p->zero_grad();
}

template <typename T>
std::vector<Parameter<T>*> LilaNet<T>::parameters() {
  std::vector<Parameter<T>*> out;
  for (auto& block : blocks_) {
    const auto params = block.parameters();
    out.insert(out.end(), params.begin(), params.end());
  }
  out.push_back(&classifier_.kernel);
  out.push_back(&classifier_.bias);
  return out;
}

template <typename T>
std::vector<const Parameter<T>*> LilaNet<T>::parameters() const {
  std::vector<const Parameter<T>*> out;
  for (const auto& block : blocks_) {
    const auto params = block.parameters();
    out.insert(out.end(), params.begin(), params.end());
  }
  out.push_back(&classifier_.kernel);
  out.push_back(&classifier_.bias);
  return out;
}

template <typename T>
std::size_t LilaNet<T>::parameter_count() const {
  std::size_t n = 0;
  for (const Parameter<T>* p : parameters()) n += p->value.size();
  return n;
}

template <typename T>
std::vector<bool> LilaNet<T>::relu_pattern() const {
  std::vector<bool> pattern;
  auto append = [&](const Tensor<T>& pre) {
    for (const T v : pre.data()) pattern.push_back(v > T(0));
  };
  for (const auto& cache : caches_) {
    for (const auto& pre : cache.branch_pre) append(pre);
    append(cache.bottleneck_pre);
  }
  return pattern;
}

template class LilaBlock<float>;
template class LilaBlock<double>;
template class LilaNet<float>;
template class LilaNet<double>;

}  // namespace lila::nn
