#include "core/pchip.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace bdp {

namespace {

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// MATLAB-style pchip endpoint slope: non-centered three-point formula,
// clamped so the end interval stays shape-preserving.
double endpoint_slope(double h1, double h2, double d1, double d2) {
  double m = ((2.0 * h1 + h2) * d1 - h1 * d2) / (h1 + h2);
  if (sign(m) != sign(d1)) {
    m = 0.0;
  } else if (sign(d1) != sign(d2) && std::abs(m) > 3.0 * std::abs(d1)) {
    m = 3.0 * d1;
  }
  return m;
}

}  // namespace

PchipInterpolant::PchipInterpolant(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 3 || y_.size() != n) {
    fail(ErrorCode::InvalidArgument,
         "pchip needs at least 3 knots (got " + std::to_string(n) + ")");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) {
      fail(ErrorCode::InvalidArgument,
           "pchip knots must be strictly increasing");
    }
  }

  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  m_.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (sign(d[i - 1]) * sign(d[i]) <= 0.0) {
      m_[i] = 0.0;
    } else {
      // Weighted harmonic mean of the neighboring secants.
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  m_[0] = endpoint_slope(h[0], h[1], d[0], d[1]);
  m_[n - 1] = endpoint_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

double PchipInterpolant::operator()(double xq) const {
  if (xq < x_.front() || xq > x_.back()) {
    fail(ErrorCode::InvalidArgument,
         "pchip query " + std::to_string(xq) + " outside [" +
             std::to_string(x_.front()) + ", " + std::to_string(x_.back()) +
             "]");
  }
  // Locate the interval via binary search.
  std::size_t lo = 0, hi = x_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (x_[mid] <= xq) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double h = x_[lo + 1] - x_[lo];
  const double t = (xq - x_[lo]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[lo] + h10 * h * m_[lo] + h01 * y_[lo + 1] +
         h11 * h * m_[lo + 1];
}

std::vector<double> PchipInterpolant::evaluate_integer_grid() const {
  const long first = long(std::ceil(x_.front()));
  const long last = long(std::floor(x_.back()));
  std::vector<double> out;
  out.reserve(std::size_t(last - first + 1));
  for (long c = first; c <= last; ++c) {
    out.push_back((*this)(double(c)));
  }
  return out;
}

}  // namespace bdp
