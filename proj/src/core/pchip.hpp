#pragma once

#include <vector>

namespace bdp {

// Shape-preserving monotone cubic Hermite interpolant (Fritsch-Carlson
// slopes, three-point endpoint rule with clamping). Exact at the knots and
// monotone wherever the data is monotone.
class PchipInterpolant {
 public:
  PchipInterpolant(std::vector<double> x, std::vector<double> y);

  double operator()(double xq) const;

  // Evaluates at every integer in [ceil(x.front()), floor(x.back())].
  std::vector<double> evaluate_integer_grid() const;

 private:
  std::vector<double> x_, y_, m_;  // knots and endpoint slopes
};

}  // namespace bdp
