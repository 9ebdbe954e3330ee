#pragma once

#include <cstdint>
#include <vector>

#include "core/matrix.hpp"
#include "core/rng.hpp"

namespace bdp {

// One LSTM cell. Gate rows are blocked in the order [input, forget,
// candidate, output], so the forget-gate slice of b is [h, 2h).
struct LstmCellParams {
  std::size_t hidden = 0;  // h
  std::size_t input = 0;   // d
  Matrix2D wx;             // 4h x d
  Matrix2D wh;             // 4h x h
  std::vector<double> b;   // 4h

  LstmCellParams() = default;
  LstmCellParams(std::size_t h, std::size_t d);

  // Glorot-style uniform init for wx/wh; zero biases except forget gate = 1.
  void init(SeededRng& rng);

  void validate() const;
  std::uint64_t fingerprint() const;  // identity tag used by caches
};

struct LstmCellCache {
  std::uint64_t params_tag = 0;
  std::size_t hidden = 0;
  std::size_t input = 0;
  std::vector<double> x, h_prev, c_prev;
  std::vector<double> i, f, g, o, c, tanh_c;
};

struct LstmCellGrads {
  std::vector<double> x, h_prev, c_prev;
  Matrix2D wx, wh;
  std::vector<double> b;
};

// Single-step forward: returns (h_t, c_t) and fills the cache needed for an
// exact backward pass.
void lstm_cell_forward(const std::vector<double>& x_t,
                       const std::vector<double>& h_prev,
                       const std::vector<double>& c_prev,
                       const LstmCellParams& params, std::vector<double>& h_t,
                       std::vector<double>& c_t, LstmCellCache& cache);

// Exact gradients of the forward map. `grad_h`/`grad_c` are dL/dh_t, dL/dc_t.
LstmCellGrads lstm_cell_backward(const LstmCellCache& cache,
                                 const LstmCellParams& params,
                                 const std::vector<double>& grad_h,
                                 const std::vector<double>& grad_c);

double sigmoid(double x);

}  // namespace bdp
