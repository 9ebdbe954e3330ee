#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace bdp {

// Dense row-major 64-bit matrix. This is the storage contract for all model
// parameters; heavy products go through Eigen maps over this layout.
struct Matrix2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // length rows * cols, row-major

  Matrix2D() = default;
  Matrix2D(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::size_t size() const { return rows * cols; }
};

// Throws if any entry is non-finite. `what` names the operand in the error.
void check_finite(const std::vector<double>& values, const std::string& what);
void check_finite(const Matrix2D& m, const std::string& what);

void check_dims(const Matrix2D& m, std::size_t rows, std::size_t cols,
                const std::string& what);

}  // namespace bdp
