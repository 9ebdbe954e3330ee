#include "core/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace bdp {

namespace {

double probe(const LossFn& loss, std::vector<double>& work, std::size_t k,
             double value) {
  const double saved = work[k];
  work[k] = value;
  const double out = loss(work);
  work[k] = saved;
  if (!std::isfinite(out)) {
    fail(ErrorCode::Numeric, "non-finite loss while probing coordinate " +
                                 std::to_string(k));
  }
  return out;
}

}  // namespace

std::vector<double> finite_difference_gradient_at(
    const LossFn& loss, std::span<const double> params, double step,
    const std::vector<std::size_t>& coords) {
  if (!(step > 0.0)) {
    fail(ErrorCode::InvalidArgument, "finite difference step must be > 0");
  }
  std::vector<double> work(params.begin(), params.end());
  std::vector<double> grad(coords.size(), 0.0);
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const std::size_t k = coords[j];
    if (k >= work.size()) {
      fail(ErrorCode::InvalidArgument, "coordinate index out of range");
    }
    const double plus = probe(loss, work, k, work[k] + step);
    const double minus = probe(loss, work, k, work[k] - step);
    grad[j] = (plus - minus) / (2.0 * step);
  }
  return grad;
}

std::vector<double> finite_difference_gradient(const LossFn& loss,
                                               std::span<const double> params,
                                               double step) {
  std::vector<std::size_t> coords(params.size());
  for (std::size_t k = 0; k < coords.size(); ++k) coords[k] = k;
  return finite_difference_gradient_at(loss, params, step, coords);
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace bdp
