#include "lila/neural/adam.hpp"

#include <cmath>
#include <string>

namespace lila::nn {

template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamMoments<T>& moments,
               std::int64_t step, const AdamConfig& config) {
  if (grads.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "Adam: " + std::to_string(grads.size()) +
                                               " gradients for " + std::to_string(params.size()) +
                                               " parameters");
  }
  if (step < 1) throw Error(ErrorCode::kInvalidArgument, "Adam step count starts at 1");
  if (moments.first.empty() && moments.second.empty()) {
    moments.first.assign(params.size(), T(0));
    moments.second.assign(params.size(), T(0));
  }
  if (moments.first.size() != params.size() || moments.second.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "Adam moments do not match parameter count");
  }
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double m = b1 * moments.first[i] + (1.0 - b1) * g;
    const double v = b2 * moments.second[i] + (1.0 - b2) * g * g;
    moments.first[i] = static_cast<T>(m);
    moments.second[i] = static_cast<T>(v);
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    params[i] = static_cast<T>(params[i] -
                               config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon));
  }
}

template <typename T>
Adam<T>::Adam(std::vector<Parameter<T>*> params, AdamConfig config)
    : params_(std::move(params)), moments_(params_.size()), config_(config) {}

template <typename T>
void Adam<T>::step() {
  ++steps_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter<T>& p = *params_[i];
    adam_step<T>(p.value.data(), p.grad.data(), moments_[i], steps_, config_);
  }
}

template void adam_step<float>(std::span<float>, std::span<const float>, AdamMoments<float>&,
                               std::int64_t, const AdamConfig&);
template void adam_step<double>(std::span<double>, std::span<const double>, AdamMoments<double>&,
                                std::int64_t, const AdamConfig&);
template class Adam<float>;
template class Adam<double>;

}  // namespace lila::nn
