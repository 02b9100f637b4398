#include "nugget/adam.hpp"

#include <cmath>
#include <string>

#include "nugget/errors.hpp"

namespace nugget::ad {

void adam_step(AdamState& state, std::span<std::vector<double>* const> params,
               std::span<const std::vector<double>> grads) {
  if (params.size() != grads.size()) throw ArgumentError("adam_step: parameter and gradient counts differ");
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (params[p]->size() != grads[p].size()) {
      throw ArgumentError("adam_step: gradient " + std::to_string(p) + " has wrong size");
    }
    for (double g : grads[p])
      if (!std::isfinite(g)) throw NumericalError("adam_step: non-finite gradient in array " + std::to_string(p));
  }
  if (state.first.empty()) {
    for (const auto* p : params) {
      state.first.emplace_back(p->size(), 0.0);
      state.second.emplace_back(p->size(), 0.0);
    }
  }
  if (state.first.size() != params.size()) throw ArgumentError("adam_step: state was built for other parameters");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t p = 0; p < params.size(); ++p) {
    std::vector<double>& w = *params[p];
    std::vector<double>& m = state.first[p];
    std::vector<double>& v = state.second[p];
    const std::vector<double>& g = grads[p];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

}  // namespace nugget::ad
