#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "lila/neural/layers.hpp"
#include "lila/rng.hpp"

namespace lila::oracle {

/// Relative gap between an analytic and a numeric derivative. Central
/// differences with h = 1e-5 on an O(1) objective carry about 1e-10 of
/// rounding noise, so derivatives below `floor` are compared in absolute
/// terms (1e-9 at the usual 1e-4 tolerance).
inline double relative_error(double analytic, double numeric, double floor = 1e-5) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct GradCheckResult {
  std::size_t checked = 0;
  std::size_t skipped = 0;  // steps that flipped a ReLU gate
  double max_error = 0.0;
  double worst_analytic = 0.0;  // the pair behind max_error
  double worst_numeric = 0.0;

  void record(double analytic, double numeric) {
    const double e = relative_error(analytic, numeric);
    if (e > max_error) {
      max_error = e;
      worst_analytic = analytic;
      worst_numeric = numeric;
    }
    ++checked;
  }

  GradCheckResult& operator+=(const GradCheckResult& o) {
    checked += o.checked;
    skipped += o.skipped;
    if (o.max_error > max_error) {
      max_error = o.max_error;
      worst_analytic = o.worst_analytic;
      worst_numeric = o.worst_numeric;
    }
    return *this;
  }
};

/// Up to `k` distinct indices in [0, n), all of them when k >= n.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (k >= n) return idx;
  rng.shuffle(idx.begin(), idx.end());
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

using Gates = std::function<std::vector<bool>()>;

/// Central differences of `objective` with respect to values[i] for every
/// index, compared against analytic[i]. When `gates` is given, coordinates
/// whose +h or -h evaluation changes the gate pattern are skipped.
inline GradCheckResult check_coordinates(std::span<double> values,
                                         std::span<const double> analytic,
                                         const std::vector<std::size_t>& indices,
                                         const std::function<double()>& objective,
                                         const Gates& gates = {}, double h = 1e-5) {
  GradCheckResult result;
  objective();
  const std::vector<bool> base = gates ? gates() : std::vector<bool>{};
  for (const std::size_t i : indices) {
    const double saved = values[i];
    values[i] = saved + h;
    const double plus = objective();
    const bool plus_same = !gates || gates() == base;
    values[i] = saved - h;
    const double minus = objective();
    const bool minus_same = !gates || gates() == base;
    values[i] = saved;
    if (!plus_same || !minus_same) {
      ++result.skipped;
      continue;
    }
    result.record(analytic[i], (plus - minus) / (2.0 * h));
  }
  objective();
  return result;
}

/// Fixed random weighting that turns a tensor output into a scalar.
inline nn::Tensor<double> random_like(const nn::Shape& shape, Rng& rng, double lo = -1.0,
                                      double hi = 1.0) {
  nn::Tensor<double> t(shape);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

inline double dot(const nn::Tensor<double>& a, const nn::Tensor<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

}  // namespace lila::oracle
