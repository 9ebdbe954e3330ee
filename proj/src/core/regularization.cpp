#include "core/regularization.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace bdp {

void RegularizationSpec::validate() const {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
    fail(ErrorCode::InvalidArgument,
         "regularization weights must be non-negative");
  }
}

RegularizationResult regularization(std::span<const double> params,
                                    const RegularizationSpec& spec) {
  spec.validate();
  RegularizationResult out;
  out.grad.assign(params.size(), 0.0);
  out.penalty = regularization_accumulate(params, spec, {{0, params.size()}},
                                          out.grad);
  return out;
}

double regularization_accumulate(
    std::span<const double> params, const RegularizationSpec& spec,
    const std::vector<std::pair<std::size_t, std::size_t>>& ranges,
    std::span<double> grad_out) {
  spec.validate();
  if (grad_out.size() != params.size()) {
    fail(ErrorCode::Dimension, "regularization: gradient size mismatch");
  }
  double penalty = 0.0;
  for (const auto& [offset, len] : ranges) {
    if (offset + len > params.size()) {
      fail(ErrorCode::Dimension, "regularization: range exceeds parameters");
    }
    for (std::size_t k = offset; k < offset + len; ++k) {
      const double w = params[k];
      if (!std::isfinite(w)) {
        fail(ErrorCode::Numeric,
             "non-finite parameter at index " + std::to_string(k));
      }
      penalty += spec.lambda1 * std::abs(w) + spec.lambda2 * w * w;
      const double sign = (w > 0.0) ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
      grad_out[k] += spec.lambda1 * sign + 2.0 * spec.lambda2 * w;
    }
  }
  return penalty;
}

}  // namespace bdp
