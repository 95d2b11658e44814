#include "lila/neural/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace lila::nn {

std::string shape_string(const Shape& shape) {
  return "(" + std::to_string(shape[0]) + "," + std::to_string(shape[1]) + "," +
         std::to_string(shape[2]) + "," + std::to_string(shape[3]) + ")";
}

void require_shape(const Shape& actual, const Shape& expected, const char* what) {
  if (actual != expected) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + ": got " + shape_string(actual) +
                                               ", expected " + shape_string(expected));
  }
}

namespace {
std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (const int d : shape) {
    if (d < 0) throw Error(ErrorCode::kShapeMismatch, "negative tensor dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}
}  // namespace

template <typename T>
Tensor<T>::Tensor(const Shape& shape, T fill) : shape_(shape), data_(element_count(shape), fill) {}

template <typename T>
Tensor<T>::Tensor(const Shape& shape, std::vector<T> data) : shape_(shape), data_(data.begin(), data.end()) {
  if (data_.size() != element_count(shape_)) {
    throw Error(ErrorCode::kShapeMismatch,
                "tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                    shape_string(shape_));
  }
}

template <typename T>
void Tensor<T>::fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
bool Tensor<T>::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace lila::nn
