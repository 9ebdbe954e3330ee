#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bdp {

using LossFn = std::function<double(std::span<const double>)>;

// Central-difference gradient estimate, one probe pair per coordinate.
// The loss must be pure and deterministic; non-finite probe values throw.
std::vector<double> finite_difference_gradient(const LossFn& loss,
                                               std::span<const double> params,
                                               double step);

// Same, but only for the listed coordinates (used when the parameter vector
// is large and a sampled check suffices).
std::vector<double> finite_difference_gradient_at(
    const LossFn& loss, std::span<const double> params, double step,
    const std::vector<std::size_t>& coords);

// |a-b| / max(|a|, |b|, floor); the floor keeps near-zero pairs comparable.
double relative_error(double a, double b, double floor = 1e-8);

}  // namespace bdp
