#include "core/lstm.hpp"

#include <cmath>

namespace bdp {

namespace {

void check_vec(const std::vector<double>& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    fail(ErrorCode::Dimension, std::string(what) + " has length " +
                                   std::to_string(v.size()) + ", expected " +
                                   std::to_string(n));
  }
}

}  // namespace

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LstmCellParams::LstmCellParams(std::size_t h, std::size_t d)
    : hidden(h), input(d), wx(4 * h, d), wh(4 * h, h), b(4 * h, 0.0) {
  for (std::size_t k = h; k < 2 * h; ++k) b[k] = 1.0;
}

void LstmCellParams::init(SeededRng& rng) {
  const double lim_x = std::sqrt(6.0 / double(input + 4 * hidden));
  for (auto& w : wx.data) w = rng.uniform(-lim_x, lim_x);
  const double lim_h = std::sqrt(6.0 / double(hidden + 4 * hidden));
  for (auto& w : wh.data) w = rng.uniform(-lim_h, lim_h);
  for (std::size_t k = 0; k < 4 * hidden; ++k)
    b[k] = (k >= hidden && k < 2 * hidden) ? 1.0 : 0.0;
}

void LstmCellParams::validate() const {
  check_dims(wx, 4 * hidden, input, "wx");
  check_dims(wh, 4 * hidden, hidden, "wh");
  if (b.size() != 4 * hidden) {
    fail(ErrorCode::Dimension, "b has length " + std::to_string(b.size()) +
                                   ", expected " + std::to_string(4 * hidden));
  }
}

std::uint64_t LstmCellParams::fingerprint() const {
  std::uint64_t tag = fnv1a64("lstm-cell");
  tag ^= reinterpret_cast<std::uintptr_t>(wx.data.data());
  tag = tag * 0x100000001b3ULL + hidden;
  tag = tag * 0x100000001b3ULL + input;
  return tag;
}

void lstm_cell_forward(const std::vector<double>& x_t,
                       const std::vector<double>& h_prev,
                       const std::vector<double>& c_prev,
                       const LstmCellParams& params, std::vector<double>& h_t,
                       std::vector<double>& c_t, LstmCellCache& cache) {
  params.validate();
  const std::size_t h = params.hidden;
  const std::size_t d = params.input;
  check_vec(x_t, d, "x_t");
  check_vec(h_prev, h, "h_prev");
  check_vec(c_prev, h, "c_prev");

  std::vector<double> pre(4 * h);
  for (std::size_t r = 0; r < 4 * h; ++r) {
    double acc = params.b[r];
    const double* wxr = &params.wx.data[r * d];
    for (std::size_t k = 0; k < d; ++k) acc += wxr[k] * x_t[k];
    const double* whr = &params.wh.data[r * h];
    for (std::size_t k = 0; k < h; ++k) acc += whr[k] * h_prev[k];
    pre[r] = acc;
  }

  cache.params_tag = params.fingerprint();
  cache.hidden = h;
  cache.input = d;
  cache.x = x_t;
  cache.h_prev = h_prev;
  cache.c_prev = c_prev;
  cache.i.resize(h);
  cache.f.resize(h);
  cache.g.resize(h);
  cache.o.resize(h);
  cache.c.resize(h);
  cache.tanh_c.resize(h);
  h_t.resize(h);
  c_t.resize(h);

  for (std::size_t k = 0; k < h; ++k) {
    const double i = sigmoid(pre[k]);
    const double f = sigmoid(pre[h + k]);
    const double g = std::tanh(pre[2 * h + k]);
    const double o = sigmoid(pre[3 * h + k]);
    const double c = f * c_prev[k] + i * g;
    const double tc = std::tanh(c);
    cache.i[k] = i;
    cache.f[k] = f;
    cache.g[k] = g;
    cache.o[k] = o;
    cache.c[k] = c;
    cache.tanh_c[k] = tc;
    c_t[k] = c;
    h_t[k] = o * tc;
  }
  check_finite(h_t, "h_t");
  check_finite(c_t, "c_t");
}

LstmCellGrads lstm_cell_backward(const LstmCellCache& cache,
                                 const LstmCellParams& params,
                                 const std::vector<double>& grad_h,
                                 const std::vector<double>& grad_c) {
  if (cache.params_tag != params.fingerprint() ||
      cache.hidden != params.hidden || cache.input != params.input) {
    fail(ErrorCode::InvalidArgument,
         "cache does not belong to these cell parameters");
  }
  const std::size_t h = params.hidden;
  const std::size_t d = params.input;
  check_vec(grad_h, h, "grad_h");
  check_vec(grad_c, h, "grad_c");

  LstmCellGrads grads;
  grads.x.assign(d, 0.0);
  grads.h_prev.assign(h, 0.0);
  grads.c_prev.assign(h, 0.0);
  grads.wx = Matrix2D(4 * h, d);
  grads.wh = Matrix2D(4 * h, h);
  grads.b.assign(4 * h, 0.0);

  std::vector<double> da(4 * h);
  for (std::size_t k = 0; k < h; ++k) {
    const double i = cache.i[k], f = cache.f[k], g = cache.g[k],
                 o = cache.o[k], tc = cache.tanh_c[k];
    const double dc = grad_c[k] + grad_h[k] * o * (1.0 - tc * tc);
    const double d_o = grad_h[k] * tc;
    da[k] = dc * g * i * (1.0 - i);
    da[h + k] = dc * cache.c_prev[k] * f * (1.0 - f);
    da[2 * h + k] = dc * i * (1.0 - g * g);
    da[3 * h + k] = d_o * o * (1.0 - o);
    grads.c_prev[k] = dc * f;
  }

  for (std::size_t r = 0; r < 4 * h; ++r) {
    const double a = da[r];
    grads.b[r] = a;
    double* gwx = &grads.wx.data[r * d];
    const double* wxr = &params.wx.data[r * d];
    for (std::size_t k = 0; k < d; ++k) {
      gwx[k] = a * cache.x[k];
      grads.x[k] += wxr[k] * a;
    }
    double* gwh = &grads.wh.data[r * h];
    const double* whr = &params.wh.data[r * h];
    for (std::size_t k = 0; k < h; ++k) {
      gwh[k] = a * cache.h_prev[k];
      grads.h_prev[k] += whr[k] * a;
    }
  }
  return grads;
}

}  // namespace bdp
