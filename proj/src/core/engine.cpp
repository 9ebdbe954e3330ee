#include "core/engine.hpp"

#include <Eigen/Dense>

#include "core/errors.hpp"

namespace bdp::engine {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Map = Eigen::Map<Mat>;
using CMap = Eigen::Map<const Mat>;
using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;
using CVecMap = Eigen::Map<const Vec>;

// Sigmoid / tanh on matrix blocks, vectorized through Eigen's exp.
template <typename Block>
void sigmoid_inplace(Block blk) {
  blk.array() = ((-blk.array()).exp() + 1.0).inverse();
}

template <typename Block>
void tanh_inplace(Block blk) {
  blk.array() = 2.0 * ((-2.0 * blk.array()).exp() + 1.0).inverse() - 1.0;
}

// One direction of one bidirectional layer, forward pass over a slab block.
// Writes the hidden sequence into rows [row_off, row_off+h) of `out`
// (2h x U*B). When `x_repeated`, x is d x B and stands for every step.
void dir_forward(const DirView& p, int h, int d, const double* x,
                 bool x_repeated, int U, int B, const int* k_at, bool reverse,
                 std::vector<double>& gates, std::vector<double>& cbuf,
                 std::vector<double>& tcbuf, double* out, int out_rows,
                 int row_off) {
  const std::size_t n = std::size_t(U) * B;
  gates.assign(4 * h * n, 0.0);
  cbuf.assign(std::size_t(h) * n, 0.0);
  tcbuf.assign(std::size_t(h) * n, 0.0);

  CRowMap wx(p.wx, 4 * h, d);
  CRowMap wh(p.wh, 4 * h, h);
  CVecMap bias(p.b, 4 * h);
  Map g_all(gates.data(), 4 * h, n);

  if (x_repeated) {
    Mat gx = wx * CMap(x, d, B);
    for (int u = 0; u < U; ++u) g_all.middleCols(std::size_t(u) * B, B) = gx;
  } else {
    g_all.noalias() = wx * CMap(x, d, n);
  }

  Map c_all(cbuf.data(), h, n);
  Map tc_all(tcbuf.data(), h, n);
  Map out_all(out, out_rows, n);

  for (int step = 0; step < U; ++step) {
    const int u = reverse ? (U - 1 - step) : step;
    const int k = k_at ? k_at[u] : B;
    if (k == 0) continue;
    const int prev = reverse ? u + 1 : u - 1;

    auto g_u = g_all.block(0, std::size_t(u) * B, 4 * h, k);
    g_u.colwise() += bias;
    if (prev >= 0 && prev < U) {
      g_u.noalias() +=
          wh * out_all.block(row_off, std::size_t(prev) * B, h, k);
    }
    sigmoid_inplace(g_u.topRows(2 * h));
    tanh_inplace(g_u.middleRows(2 * h, h));
    sigmoid_inplace(g_u.bottomRows(h));

    auto i_g = g_u.topRows(h).array();
    auto f_g = g_u.middleRows(h, h).array();
    auto g_g = g_u.middleRows(2 * h, h).array();
    auto o_g = g_u.bottomRows(h).array();

    auto c_u = c_all.block(0, std::size_t(u) * B, h, k);
    if (prev >= 0 && prev < U) {
      c_u.array() =
          f_g * c_all.block(0, std::size_t(prev) * B, h, k).array() +
          i_g * g_g;
    } else {
      c_u.array() = i_g * g_g;
    }
    auto tc_u = tc_all.block(0, std::size_t(u) * B, h, k);
    tc_u = c_u;
    tanh_inplace(tc_u);
    out_all.block(row_off, std::size_t(u) * B, h, k).array() =
        o_g * tc_u.array();
  }
}

// Matching backward pass. `d_out` carries dL/d(hidden) per step in rows
// [row_off, row_off+h). Parameter gradients accumulate into `grads`; input
// gradients (d x U*B, or d x B when repeated) into dx_accum when non-null.
void dir_backward(const DirView& p, int h, int d, const double* x,
                  bool x_repeated, int U, int B, const int* k_at, bool reverse,
                  const std::vector<double>& gates,
                  const std::vector<double>& cbuf,
                  const std::vector<double>& tcbuf, const double* out,
                  int out_rows, int row_off, const double* d_out,
                  int d_out_rows, int d_out_row_off, std::vector<double>& da,
                  std::span<double> grads, double* dx_accum) {
  const std::size_t n = std::size_t(U) * B;
  da.assign(4 * h * n, 0.0);

  CRowMap wx(p.wx, 4 * h, d);
  CRowMap wh(p.wh, 4 * h, h);
  CMap g_all(gates.data(), 4 * h, n);
  CMap c_all(cbuf.data(), h, n);
  CMap tc_all(tcbuf.data(), h, n);
  CMap out_all(out, out_rows, n);
  CMap dout_all(d_out, d_out_rows, n);
  Map da_all(da.data(), 4 * h, n);

  Mat dh_carry = Mat::Zero(h, B);
  Mat dc_carry = Mat::Zero(h, B);
  Mat dh(h, B), dc(h, B);

  // Reverse the temporal order used by the forward sweep.
  for (int step = 0; step < U; ++step) {
    const int u = reverse ? step : (U - 1 - step);
    const int k = k_at ? k_at[u] : B;
    if (k == 0) continue;
    const int prev = reverse ? u + 1 : u - 1;

    auto i_g = g_all.block(0, std::size_t(u) * B, h, k).array();
    auto f_g = g_all.block(h, std::size_t(u) * B, h, k).array();
    auto g_g = g_all.block(2 * h, std::size_t(u) * B, h, k).array();
    auto o_g = g_all.block(3 * h, std::size_t(u) * B, h, k).array();
    auto tc = tc_all.block(0, std::size_t(u) * B, h, k).array();

    dh.leftCols(k) =
        dout_all.block(d_out_row_off, std::size_t(u) * B, h, k) +
        dh_carry.leftCols(k);
    dc.leftCols(k).array() =
        dc_carry.leftCols(k).array() +
        dh.leftCols(k).array() * o_g * (1.0 - tc * tc);

    auto da_u = da_all.block(0, std::size_t(u) * B, 4 * h, k);
    da_u.topRows(h).array() = dc.leftCols(k).array() * g_g * i_g * (1.0 - i_g);
    if (prev >= 0 && prev < U) {
      da_u.middleRows(h, h).array() =
          dc.leftCols(k).array() *
          c_all.block(0, std::size_t(prev) * B, h, k).array() * f_g *
          (1.0 - f_g);
    } else {
      da_u.middleRows(h, h).setZero();  // c_prev == 0
    }
    da_u.middleRows(2 * h, h).array() =
        dc.leftCols(k).array() * i_g * (1.0 - g_g * g_g);
    da_u.bottomRows(h).array() =
        dh.leftCols(k).array() * tc * o_g * (1.0 - o_g);

    dc_carry.leftCols(k).array() = dc.leftCols(k).array() * f_g;
    dh_carry.leftCols(k).noalias() = wh.transpose() * da_u;
  }

  RowMap dwx(grads.data() + p.wx_off, 4 * h, d);
  RowMap dwh(grads.data() + p.wh_off, 4 * h, h);
  Eigen::Map<Vec> db(grads.data() + p.b_off, 4 * h);
  db += da_all.rowwise().sum();

  if (x_repeated) {
    Mat s = Mat::Zero(4 * h, B);
    for (int u = 0; u < U; ++u) s += da_all.middleCols(std::size_t(u) * B, B);
    dwx.noalias() += s * CMap(x, d, B).transpose();
    if (dx_accum) Map(dx_accum, d, B).noalias() += wx.transpose() * s;
  } else {
    CMap x_all(x, d, n);
    dwx.noalias() += da_all * x_all.transpose();
    if (dx_accum) Map(dx_accum, d, n).noalias() += wx.transpose() * da_all;
  }

  // Recurrent weight gradient: pair each step's da with the previous step's
  // hidden state of this direction (time-shifted by one slab block).
  if (U >= 2) {
    const std::size_t m = std::size_t(U - 1) * B;
    auto h_rows = out_all.middleRows(row_off, h);
    if (!reverse) {
      dwh.noalias() += da_all.rightCols(m) * h_rows.leftCols(m).transpose();
    } else {
      dwh.noalias() += da_all.leftCols(m) * h_rows.rightCols(m).transpose();
    }
  }
}

void ensure_cache(StackCache& cache, const StackView& stack, int U, int B) {
  cache.U = U;
  cache.B = B;
  cache.layers.resize(stack.size());
  cache.out.resize(stack.size());
  const std::size_t n = std::size_t(U) * B;
  for (std::size_t l = 0; l < stack.size(); ++l) {
    cache.out[l].assign(std::size_t(2 * stack[l].h) * n, 0.0);
  }
}

}  // namespace

void SlabInput::build_k_at() {
  k_at.assign(steps(), 0);
  for (int u = 0; u < steps(); ++u) {
    const int t = t0 + u;
    int k = 0;
    while (k < B && valid_from[k] <= t) ++k;
    k_at[u] = k;
  }
}

void stack_encode_forward(const StackView& stack, const SlabInput& in,
                          StackCache& cache, std::vector<double>& c_out) {
  const int U = in.steps();
  const int B = in.B;
  if (U <= 0 || B <= 0) {
    fail(ErrorCode::InvalidArgument, "empty input window");
  }
  ensure_cache(cache, stack, U, B);

  const double* x = in.x.data();
  int d = in.C;
  for (std::size_t l = 0; l < stack.size(); ++l) {
    const auto& layer = stack[l];
    if (layer.d_in != d) {
      fail(ErrorCode::Dimension, "encoder layer input size mismatch");
    }
    auto& lc = cache.layers[l];
    dir_forward(layer.fwd, layer.h, d, x, false, U, B, in.k_at.data(), false,
                lc.gates_f, lc.c_f, lc.tc_f, cache.out[l].data(), 2 * layer.h,
                0);
    dir_forward(layer.bwd, layer.h, d, x, false, U, B, in.k_at.data(), true,
                lc.gates_b, lc.c_b, lc.tc_b, cache.out[l].data(), 2 * layer.h,
                layer.h);
    x = cache.out[l].data();
    d = 2 * layer.h;
  }

  // c = [forward state at the last step; backward state at the first valid
  // step], taken from the top layer.
  const int h = stack.back().h;
  c_out.assign(std::size_t(2 * h) * B, 0.0);
  CMap top(cache.out.back().data(), 2 * h, std::size_t(U) * B);
  Map c(c_out.data(), 2 * h, B);
  for (int j = 0; j < B; ++j) {
    c.block(0, j, h, 1) = top.block(0, std::size_t(U - 1) * B + j, h, 1);
    const int u_first = in.valid_from[j] - in.t0;
    c.block(h, j, h, 1) = top.block(h, std::size_t(u_first) * B + j, h, 1);
  }
}

void stack_encode_backward(const StackView& stack, const SlabInput& in,
                           const StackCache& cache,
                           const std::vector<double>& dc,
                           std::span<double> grads) {
  const int U = cache.U;
  const int B = cache.B;
  const std::size_t n = std::size_t(U) * B;
  const int h_top = stack.back().h;

  std::vector<double> d_cur(std::size_t(2 * h_top) * n, 0.0);
  {
    Map d_top(d_cur.data(), 2 * h_top, n);
    CMap dcm(dc.data(), 2 * h_top, B);
    for (int j = 0; j < B; ++j) {
      d_top.block(0, std::size_t(U - 1) * B + j, h_top, 1) +=
          dcm.block(0, j, h_top, 1);
      const int u_first = in.valid_from[j] - in.t0;
      d_top.block(h_top, std::size_t(u_first) * B + j, h_top, 1) +=
          dcm.block(h_top, j, h_top, 1);
    }
  }

  std::vector<double> d_below;
  std::vector<double> da;
  for (int l = int(stack.size()) - 1; l >= 0; --l) {
    const auto& layer = stack[l];
    const auto& lc = cache.layers[l];
    const double* x = (l == 0) ? in.x.data() : cache.out[l - 1].data();
    const int d = layer.d_in;
    double* dx = nullptr;
    if (l > 0) {
      d_below.assign(std::size_t(d) * n, 0.0);
      dx = d_below.data();
    }
    dir_backward(layer.fwd, layer.h, d, x, false, U, B, in.k_at.data(), false,
                 lc.gates_f, lc.c_f, lc.tc_f, cache.out[l].data(), 2 * layer.h,
                 0, d_cur.data(), 2 * layer.h, 0, da, grads, dx);
    dir_backward(layer.bwd, layer.h, d, x, false, U, B, in.k_at.data(), true,
                 lc.gates_b, lc.c_b, lc.tc_b, cache.out[l].data(), 2 * layer.h,
                 layer.h, d_cur.data(), 2 * layer.h, layer.h, da, grads, dx);
    if (l > 0) d_cur.swap(d_below);
  }
}

void stack_decode_forward(const StackView& stack, const std::vector<double>& c,
                          int B, int T_out, StackCache& cache) {
  ensure_cache(cache, stack, T_out, B);
  const double* x = c.data();
  int d = stack.front().d_in;
  bool repeated = true;
  for (std::size_t l = 0; l < stack.size(); ++l) {
    const auto& layer = stack[l];
    auto& lc = cache.layers[l];
    dir_forward(layer.fwd, layer.h, d, x, repeated, T_out, B, nullptr, false,
                lc.gates_f, lc.c_f, lc.tc_f, cache.out[l].data(), 2 * layer.h,
                0);
    dir_forward(layer.bwd, layer.h, d, x, repeated, T_out, B, nullptr, true,
                lc.gates_b, lc.c_b, lc.tc_b, cache.out[l].data(), 2 * layer.h,
                layer.h);
    x = cache.out[l].data();
    d = 2 * layer.h;
    repeated = false;
  }
}

void stack_decode_backward(const StackView& stack, const std::vector<double>& c,
                           int B, int T_out, const StackCache& cache,
                           const std::vector<double>& d_top,
                           std::span<double> grads,
                           std::vector<double>& dc_accum) {
  const std::size_t n = std::size_t(T_out) * B;
  std::vector<double> d_cur(d_top);
  std::vector<double> d_below;
  std::vector<double> da;
  for (int l = int(stack.size()) - 1; l >= 0; --l) {
    const auto& layer = stack[l];
    const auto& lc = cache.layers[l];
    const bool repeated = (l == 0);
    const double* x = repeated ? c.data() : cache.out[l - 1].data();
    double* dx = nullptr;
    if (repeated) {
      dx = dc_accum.data();
    } else {
      d_below.assign(std::size_t(layer.d_in) * n, 0.0);
      dx = d_below.data();
    }
    dir_backward(layer.fwd, layer.h, layer.d_in, x, repeated, T_out, B,
                 nullptr, false, lc.gates_f, lc.c_f, lc.tc_f,
                 cache.out[l].data(), 2 * layer.h, 0, d_cur.data(),
                 2 * layer.h, 0, da, grads, dx);
    dir_backward(layer.bwd, layer.h, layer.d_in, x, repeated, T_out, B,
                 nullptr, true, lc.gates_b, lc.c_b, lc.tc_b,
                 cache.out[l].data(), 2 * layer.h, layer.h, d_cur.data(),
                 2 * layer.h, layer.h, da, grads, dx);
    if (l > 0) d_cur.swap(d_below);
  }
}

void head_forward(const HeadView& head, const double* z0, int n,
                  HeadCache& cache, std::vector<double>& out) {
  cache.z1.assign(std::size_t(head.d1) * n, 0.0);
  cache.z2.assign(std::size_t(head.d2) * n, 0.0);
  out.assign(n, 0.0);

  CRowMap w1(head.w1, head.d1, head.d_in);
  CRowMap w2(head.w2, head.d2, head.d1);
  CRowMap w3(head.w3, 1, head.d2);
  Map z1(cache.z1.data(), head.d1, n);
  Map z2(cache.z2.data(), head.d2, n);
  Map y(out.data(), 1, n);

  z1.noalias() = w1 * CMap(z0, head.d_in, n);
  z1.colwise() += CVecMap(head.b1, head.d1);
  tanh_inplace(z1.topRows(head.d1));
  z2.noalias() = w2 * z1;
  z2.colwise() += CVecMap(head.b2, head.d2);
  tanh_inplace(z2.topRows(head.d2));
  y.noalias() = w3 * z2;
  y.array() += head.b3[0];
}

void head_backward(const HeadView& head, const double* z0, int n,
                   const HeadCache& cache, const std::vector<double>& dout,
                   std::span<double> grads, std::vector<double>& dz0) {
  CRowMap w1(head.w1, head.d1, head.d_in);
  CRowMap w2(head.w2, head.d2, head.d1);
  CRowMap w3(head.w3, 1, head.d2);
  CMap z0m(z0, head.d_in, n);
  CMap z1(cache.z1.data(), head.d1, n);
  CMap z2(cache.z2.data(), head.d2, n);
  CMap dy(dout.data(), 1, n);

  RowMap dw3(grads.data() + head.w3_off, 1, head.d2);
  Eigen::Map<Vec> db3(grads.data() + head.b3_off, 1);
  dw3.noalias() += dy * z2.transpose();
  db3[0] += dy.sum();

  Mat dz2 = w3.transpose() * dy;
  dz2.array() *= (1.0 - z2.array().square());
  RowMap dw2(grads.data() + head.w2_off, head.d2, head.d1);
  Eigen::Map<Vec> db2(grads.data() + head.b2_off, head.d2);
  dw2.noalias() += dz2 * z1.transpose();
  db2 += dz2.rowwise().sum();

  Mat dz1 = w2.transpose() * dz2;
  dz1.array() *= (1.0 - z1.array().square());
  RowMap dw1(grads.data() + head.w1_off, head.d1, head.d_in);
  Eigen::Map<Vec> db1(grads.data() + head.b1_off, head.d1);
  dw1.noalias() += dz1 * z0m.transpose();
  db1 += dz1.rowwise().sum();

  Map(dz0.data(), head.d_in, n).noalias() += w1.transpose() * dz1;
}

}  // namespace bdp::engine
