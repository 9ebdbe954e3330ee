#pragma once

#include <span>
#include <vector>

namespace bdp {

struct RegularizationSpec {
  double lambda1 = 1e-5;  // L1 weight
  double lambda2 = 1e-4;  // L2 weight

  void validate() const;
};

struct RegularizationResult {
  double penalty = 0.0;
  std::vector<double> grad;
};

// penalty = l1 * sum |w| + l2 * sum w^2, grad = l1 * sign(w) + 2 * l2 * w,
// with sign(0) = 0.
RegularizationResult regularization(std::span<const double> params,
                                    const RegularizationSpec& spec);

// Accumulating variant used by the trainer; adds the gradient into `grad_out`
// over the given slices only and returns the penalty over those slices.
double regularization_accumulate(
    std::span<const double> params, const RegularizationSpec& spec,
    const std::vector<std::pair<std::size_t, std::size_t>>& ranges,
    std::span<double> grad_out);

}  // namespace bdp
