#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nugget::ad {

/// Adam with bias correction. Moments are created lazily on the first step
/// to match the parameter shapes.
struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t step = 0;
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
};

/// Applies one update to every parameter array. Any non-finite gradient
/// throws NumericalError before anything is modified.
void adam_step(AdamState& state, std::span<std::vector<double>* const> params,
               std::span<const std::vector<double>> grads);

}  // namespace nugget::ad
