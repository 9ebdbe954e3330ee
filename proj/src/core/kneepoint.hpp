#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace bdp {

struct SmoothingSpec {
  std::size_t window = 25;  // centered moving-average half-width, in points

  void validate() const;
};

struct KneeResult {
  double knee_cycle = 0.0;     // in the curve's x units
  double knee_value = 0.0;     // curve units at the knee
  double knee_gradient = 0.0;  // curve units per cycle on the smoothed curve
};

// Centered moving average; the window shrinks symmetrically at the borders,
// so curve length is preserved and window 0 is the identity.
std::vector<double> smooth(const std::vector<double>& curve,
                           const SmoothingSpec& spec);

// Offline knee identification on a reference degradation curve: smooth,
// normalize both axes to [0, 1], transform to concave increasing form, and
// take the maximum of (y_norm - x_norm). Errors with "no knee" when the
// difference curve stays below the detection floor (straight lines).
KneeResult knee_offline(const std::vector<double>& x,
                        const std::vector<double>& y,
                        const SmoothingSpec& spec);

// Online knee identification on a predicted curve: the first x at which the
// smoothed gradient magnitude reaches `reference_gradient`, interpolated
// linearly between grid points. Empty result = no knee in the horizon.
std::optional<double> knee_online(const std::vector<double>& x,
                                  const std::vector<double>& y,
                                  double reference_gradient,
                                  const SmoothingSpec& spec);

// Brute-force maximum-curvature search on the axis-normalized curve; the
// independent check for the knee detector and the source of synthetic
// ground truth. Empty result when the curve is too flat to have a knee.
std::optional<double> dense_max_curvature_knee(const std::vector<double>& x,
                                               const std::vector<double>& y);

}  // namespace bdp
