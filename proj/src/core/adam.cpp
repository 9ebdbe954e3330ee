#include "core/adam.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace bdp {

namespace {

void update_slice(std::span<double> params, std::span<const double> grads,
                  AdamState& state, double corr1, double corr2,
                  std::size_t begin, std::size_t end) {
  for (std::size_t k = begin; k < end; ++k) {
    const double g = grads[k];
    if (!std::isfinite(g)) {
      fail(ErrorCode::Numeric,
           "non-finite gradient at index " + std::to_string(k));
    }
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g;
    state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[k] / corr1;
    const double vhat = state.v[k] / corr2;
    params[k] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

}  // namespace

void adam_step_ranges(
    std::span<double> params, std::span<const double> grads, AdamState& state,
    const std::vector<std::pair<std::size_t, std::size_t>>& ranges) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    fail(ErrorCode::Dimension,
         "adam_step: params/grads/state sizes disagree (" +
             std::to_string(params.size()) + ", " +
             std::to_string(grads.size()) + ", " +
             std::to_string(state.m.size()) + ")");
  }
  state.t += 1;
  const double corr1 = 1.0 - std::pow(state.beta1, double(state.t));
  const double corr2 = 1.0 - std::pow(state.beta2, double(state.t));
  for (const auto& [offset, len] : ranges) {
    if (offset + len > params.size()) {
      fail(ErrorCode::Dimension, "adam_step: range exceeds parameter vector");
    }
    update_slice(params, grads, state, corr1, corr2, offset, offset + len);
  }
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state) {
  adam_step_ranges(params, grads, state, {{0, params.size()}});
}

}  // namespace bdp
