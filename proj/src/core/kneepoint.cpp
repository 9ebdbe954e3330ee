#include "core/kneepoint.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace bdp {

namespace {

// Below this prominence of the difference curve we call the curve knee-free.
constexpr double kMinProminence = 0.01;
// Normalized curvature below this is indistinguishable from a line.
constexpr double kMinCurvature = 1.0;

void normalize01(const std::vector<double>& v, std::vector<double>& out,
                 double& lo, double& hi) {
  lo = *std::min_element(v.begin(), v.end());
  hi = *std::max_element(v.begin(), v.end());
  out.resize(v.size());
  const double span = hi - lo;
  if (span <= 0.0) {
    fail(ErrorCode::InvalidArgument, "degenerate flat curve");
  }
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / span;
}

}  // namespace

void SmoothingSpec::validate() const {}

std::vector<double> smooth(const std::vector<double>& curve,
                           const SmoothingSpec& spec) {
  const std::size_t n = curve.size();
  if (n <= 2 * spec.window) {
    fail(ErrorCode::InvalidArgument,
         "curve of length " + std::to_string(n) +
             " is too short for smoothing window " +
             std::to_string(spec.window));
  }
  if (spec.window == 0) return curve;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t w = std::min({spec.window, i, n - 1 - i});
    double acc = 0.0;
    for (std::size_t j = i - w; j <= i + w; ++j) acc += curve[j];
    out[i] = acc / double(2 * w + 1);
  }
  return out;
}

KneeResult knee_offline(const std::vector<double>& x,
                        const std::vector<double>& y,
                        const SmoothingSpec& spec) {
  if (x.size() != y.size()) {
    fail(ErrorCode::Dimension, "knee_offline: x and y lengths differ");
  }
  const std::vector<double> ys = smooth(y, spec);
  const std::size_t n = ys.size();
  if (n < 10) {
    fail(ErrorCode::InvalidArgument,
         "knee_offline needs at least 10 points, got " + std::to_string(n));
  }

  std::vector<double> xn, yn;
  double xlo, xhi, ylo, yhi;
  normalize01(x, xn, xlo, xhi);
  normalize01(ys, yn, ylo, yhi);

  // Reject curves that wander against their overall direction too much.
  double up = 0.0, down = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = yn[i] - yn[i - 1];
    (d >= 0 ? up : down) += std::abs(d);
  }
  if (std::min(up, down) > 0.05) {
    fail(ErrorCode::InvalidArgument, "curve not monotone after smoothing");
  }

  // Transform to concave increasing form: decreasing curves flip the x axis;
  // convex curves flip both axes.
  const bool decreasing = yn.back() < yn.front();
  bool flip_x = decreasing;
  bool flip_y = false;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xt = flip_x ? 1.0 - xn[i] : xn[i];
    s += yn[i] - xt;
  }
  if (s < 0.0) {  // convex: mirror both axes
    flip_x = !flip_x;
    flip_y = true;
  }

  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xt = flip_x ? 1.0 - xn[i] : xn[i];
    const double yt = flip_y ? 1.0 - yn[i] : yn[i];
    const double diff = yt - xt;
    if (diff > best) {
      best = diff;
      best_i = i;
    }
  }
  if (best < kMinProminence) {
    fail(ErrorCode::InvalidArgument, "no knee: curve is close to linear");
  }

  KneeResult result;
  result.knee_cycle = x[best_i];
  result.knee_value = ys[best_i];
  const std::size_t a = best_i == 0 ? 0 : best_i - 1;
  const std::size_t b = best_i + 1 >= n ? n - 1 : best_i + 1;
  result.knee_gradient = (ys[b] - ys[a]) / (x[b] - x[a]);
  return result;
}

std::optional<double> knee_online(const std::vector<double>& x,
                                  const std::vector<double>& y,
                                  double reference_gradient,
                                  const SmoothingSpec& spec) {
  if (x.size() != y.size()) {
    fail(ErrorCode::Dimension, "knee_online: x and y lengths differ");
  }
  if (!(reference_gradient > 0.0)) {
    fail(ErrorCode::InvalidArgument, "reference gradient must be positive");
  }
  const std::vector<double> ys = smooth(y, spec);
  const std::size_t n = ys.size();
  if (n < 3) {
    fail(ErrorCode::InvalidArgument, "knee_online needs at least 3 points");
  }

  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 >= n ? n - 1 : i + 1;
    grad[i] = std::abs((ys[b] - ys[a]) / (x[b] - x[a]));
  }

  if (grad[0] >= reference_gradient) return x[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (grad[i] >= reference_gradient) {
      const double t =
          (reference_gradient - grad[i - 1]) / (grad[i] - grad[i - 1]);
      return x[i - 1] + t * (x[i] - x[i - 1]);
    }
  }
  return std::nullopt;  // gradient never reaches the reference
}

std::optional<double> dense_max_curvature_knee(const std::vector<double>& x,
                                               const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 5) {
    fail(ErrorCode::InvalidArgument,
         "curvature search needs at least 5 points");
  }
  std::vector<double> xn, yn;
  double xlo, xhi, ylo, yhi;
  normalize01(x, xn, xlo, xhi);
  normalize01(y, yn, ylo, yhi);

  const std::size_t n = xn.size();
  double best = 0.0;
  std::size_t best_i = 0;
  bool found = false;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = xn[i] - xn[i - 1];
    const double h2 = xn[i + 1] - xn[i];
    const double d1 = (yn[i + 1] - yn[i - 1]) / (h1 + h2);
    const double d2 = 2.0 * (h1 * yn[i + 1] - (h1 + h2) * yn[i] +
                             h2 * yn[i - 1]) /
                      (h1 * h2 * (h1 + h2));
    const double kappa = std::abs(d2) / std::pow(1.0 + d1 * d1, 1.5);
    if (kappa > best) {
      best = kappa;
      best_i = i;
      found = true;
    }
  }
  if (!found || best < kMinCurvature) return std::nullopt;
  return x[best_i];
}

}  // namespace bdp
