#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bdp {

struct AdamState {
  std::vector<double> m;  // first moment, same length as the parameter vector
  std::vector<double> v;  // second moment
  std::int64_t t = 0;     // completed steps
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, double learning_rate)
      : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

// Bias-corrected Adam update over the whole vector. Mutates params and state;
// rejects shape mismatches and non-finite gradients.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state);

// Range-restricted variant used for stage-wise parameter freezing: only the
// [offset, offset+len) slices listed in `ranges` are updated. The step
// counter advances once per call.
void adam_step_ranges(
    std::span<double> params, std::span<const double> grads, AdamState& state,
    const std::vector<std::pair<std::size_t, std::size_t>>& ranges);

}  // namespace bdp
