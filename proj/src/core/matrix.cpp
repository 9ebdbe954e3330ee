#include "core/matrix.hpp"

#include <cmath>

namespace bdp {

void check_finite(const std::vector<double>& values, const std::string& what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorCode::Numeric, what + " has non-finite entry at index " +
                                   std::to_string(i));
    }
  }
}

void check_finite(const Matrix2D& m, const std::string& what) {
  check_finite(m.data, what);
}

void check_dims(const Matrix2D& m, std::size_t rows, std::size_t cols,
                const std::string& what) {
  if (m.rows != rows || m.cols != cols) {
    fail(ErrorCode::Dimension,
         what + " has shape " + std::to_string(m.rows) + "x" +
             std::to_string(m.cols) + ", expected " + std::to_string(rows) +
             "x" + std::to_string(cols));
  }
  if (m.data.size() != m.rows * m.cols) {
    fail(ErrorCode::Dimension, what + " storage does not match its shape");
  }
}

}  // namespace bdp
