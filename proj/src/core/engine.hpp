#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bdp::engine {

// Raw views into the parameter arena for one LSTM direction. Offsets locate
// the matching slices of the gradient vector.
struct DirView {
  const double* wx = nullptr;  // 4h x d, row-major
  const double* wh = nullptr;  // 4h x h, row-major
  const double* b = nullptr;   // 4h
  std::size_t wx_off = 0, wh_off = 0, b_off = 0;
};

struct BiLayerView {
  int d_in = 0;
  int h = 0;
  DirView fwd, bwd;
};

using StackView = std::vector<BiLayerView>;

// Three fully connected layers applied per timestep: tanh, tanh, linear.
struct HeadView {
  int d_in = 0, d1 = 0, d2 = 0;
  const double *w1, *b1, *w2, *b2, *w3, *b3;
  std::size_t w1_off, b1_off, w2_off, b2_off, w3_off, b3_off;
};

// A block of sequences laid out as per-step column slabs. Steps run over the
// suffix [t0, T) of the logical window; `x` holds C x (U*B) values
// column-major where U = T - t0 and step u occupies columns [u*B, (u+1)*B).
// Columns must be sorted by valid_from ascending; positions before a
// column's valid_from are zero and are skipped by the recurrence.
struct SlabInput {
  int T = 0;
  int t0 = 0;
  int B = 0;
  int C = 0;
  std::vector<double> x;
  std::vector<int> valid_from;  // per column, absolute step index
  std::vector<int> k_at;        // per u: number of active columns at t0+u

  int steps() const { return T - t0; }
  void build_k_at();
};

// Stored activations for one bidirectional stack pass; enough for an exact
// backward pass without recomputation.
struct LayerCache {
  std::vector<double> gates_f, c_f, tc_f;  // forward direction
  std::vector<double> gates_b, c_b, tc_b;  // backward direction
};

struct StackCache {
  int U = 0, B = 0;
  std::vector<LayerCache> layers;
  std::vector<std::vector<double>> out;  // per layer: 2h x (U*B)
};

// Bidirectional stacked forward over a masked input block. Writes the hidden
// vector c (2h x B): forward state at the last step stacked on the backward
// state at each column's first valid step.
void stack_encode_forward(const StackView& stack, const SlabInput& in,
                          StackCache& cache, std::vector<double>& c_out);

// Exact gradients of stack_encode_forward given dL/dc. Accumulates parameter
// gradients into `grads` (same layout as the parameter arena).
void stack_encode_backward(const StackView& stack, const SlabInput& in,
                           const StackCache& cache,
                           const std::vector<double>& dc,
                           std::span<double> grads);

// Decoder stack: the per-column input vector c (2h x B) is repeated T_out
// times. Top-layer output (2h x T_out*B) lands in cache.out.back().
void stack_decode_forward(const StackView& stack, const std::vector<double>& c,
                          int B, int T_out, StackCache& cache);

// Gradients of the decode pass; d_top is dL/d(top output). Adds dL/dc into
// dc_accum (2h x B).
void stack_decode_backward(const StackView& stack, const std::vector<double>& c,
                           int B, int T_out, const StackCache& cache,
                           const std::vector<double>& d_top,
                           std::span<double> grads,
                           std::vector<double>& dc_accum);

struct HeadCache {
  std::vector<double> z1, z2;
};

// z0 is d_in x n; out is 1 x n.
void head_forward(const HeadView& head, const double* z0, int n,
                  HeadCache& cache, std::vector<double>& out);

// dout is 1 x n; adds dL/dz0 into dz0 (d_in x n).
void head_backward(const HeadView& head, const double* z0, int n,
                   const HeadCache& cache, const std::vector<double>& dout,
                   std::span<double> grads, std::vector<double>& dz0);

}  // namespace bdp::engine
