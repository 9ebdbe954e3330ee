#include "core/model.hpp"

#include <cmath>

#include "core/series.hpp"

namespace bdp {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Mtl: return "mtl";
    case ModelKind::StlCapacity: return "stl-cap";
    case ModelKind::StlResistance: return "stl-res";
  }
  fail(ErrorCode::InvalidArgument, "bad model kind");
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "mtl") return ModelKind::Mtl;
  if (s == "stl-cap") return ModelKind::StlCapacity;
  if (s == "stl-res") return ModelKind::StlResistance;
  fail(ErrorCode::InvalidArgument, "unknown model kind: " + s);
}

std::string branch_prefix(Branch b) {
  return b == Branch::Capacity ? "decoder_cap" : "decoder_res";
}

std::string head_prefix(Branch b) {
  return b == Branch::Capacity ? "head_cap" : "head_res";
}

Model::Model(ModelKind kind, const ModelConfig& config,
             const RegularizationSpec& reg)
    : kind_(kind), config_(config), reg_(reg) {
  config_.validate();
  reg_.validate();
  const std::size_t expected_channels = (kind == ModelKind::Mtl) ? 2 : 1;
  if (config_.input_channels != expected_channels) {
    fail(ErrorCode::InvalidArgument,
         "model kind " + to_string(kind) + " requires " +
             std::to_string(expected_channels) + " input channel(s)");
  }
  register_tensors();
}

bool Model::has_branch(Branch b) const {
  if (kind_ == ModelKind::Mtl) return true;
  return (kind_ == ModelKind::StlCapacity) == (b == Branch::Capacity);
}

void Model::register_stack(const std::string& prefix, std::size_t d0) {
  const std::size_t h = config_.hidden_size;
  for (std::size_t l = 0; l < config_.num_layers; ++l) {
    const std::size_t d = (l == 0) ? d0 : 2 * h;
    for (const char* dir : {"fwd", "bwd"}) {
      const std::string base =
          prefix + ".l" + std::to_string(l) + "." + dir + ".";
      store_.add(base + "wx", 4 * h, d);
      store_.add(base + "wh", 4 * h, h);
      store_.add(base + "b", 4 * h, 1);
    }
  }
}

void Model::register_head(const std::string& prefix) {
  const std::size_t h = config_.hidden_size;
  store_.add(prefix + ".fc1.w", h, 2 * h);
  store_.add(prefix + ".fc1.b", h, 1);
  store_.add(prefix + ".fc2.w", h / 2, h);
  store_.add(prefix + ".fc2.b", h / 2, 1);
  store_.add(prefix + ".fc3.w", 1, h / 2);
  store_.add(prefix + ".fc3.b", 1, 1);
}

void Model::register_tensors() {
  register_stack("encoder", config_.input_channels);
  if (has_branch(Branch::Capacity)) {
    register_stack(branch_prefix(Branch::Capacity), 2 * config_.hidden_size);
    register_head(head_prefix(Branch::Capacity));
  }
  if (has_branch(Branch::Resistance)) {
    register_stack(branch_prefix(Branch::Resistance), 2 * config_.hidden_size);
    register_head(head_prefix(Branch::Resistance));
  }
}

void Model::init_params(SeededRng& rng) {
  const std::size_t h = config_.hidden_size;
  for (const auto& t : store_.tensors()) {
    double* dst = store_.raw().data() + t.offset;
    const bool is_bias = t.name.ends_with(".b") || t.name.ends_with(".fc1.b") ||
                         t.name.ends_with(".fc2.b") || t.name.ends_with(".fc3.b");
    if (!is_bias) {
      // Glorot-style uniform bounds from fan-in and fan-out.
      const double lim = std::sqrt(6.0 / double(t.rows + t.cols));
      for (std::size_t k = 0; k < t.size(); ++k)
        dst[k] = rng.uniform(-lim, lim);
      continue;
    }
    for (std::size_t k = 0; k < t.size(); ++k) dst[k] = 0.0;
    if (t.name.find(".fc3.b") != std::string::npos) {
      dst[0] = 1.0;  // start predictions at SOH ~ 1
    } else if (t.name.find(".fc") == std::string::npos) {
      // LSTM bias: forget-gate slice starts at 1.
      for (std::size_t k = h; k < 2 * h; ++k) dst[k] = 1.0;
    }
  }
}

engine::StackView Model::stack_view(const std::string& prefix,
                                    std::size_t d0) const {
  engine::StackView view;
  const std::size_t h = config_.hidden_size;
  for (std::size_t l = 0; l < config_.num_layers; ++l) {
    engine::BiLayerView layer;
    layer.h = int(h);
    layer.d_in = int(l == 0 ? d0 : 2 * h);
    for (int dir = 0; dir < 2; ++dir) {
      const std::string base = prefix + ".l" + std::to_string(l) + "." +
                               (dir == 0 ? "fwd" : "bwd") + ".";
      engine::DirView& dv = dir == 0 ? layer.fwd : layer.bwd;
      const auto& wx = store_.spec(base + "wx");
      const auto& wh = store_.spec(base + "wh");
      const auto& b = store_.spec(base + "b");
      dv.wx = store_.raw().data() + wx.offset;
      dv.wh = store_.raw().data() + wh.offset;
      dv.b = store_.raw().data() + b.offset;
      dv.wx_off = wx.offset;
      dv.wh_off = wh.offset;
      dv.b_off = b.offset;
    }
    view.push_back(layer);
  }
  return view;
}

engine::StackView Model::encoder_view() const {
  return stack_view("encoder", config_.input_channels);
}

engine::StackView Model::decoder_view(Branch b) const {
  if (!has_branch(b)) {
    fail(ErrorCode::InvalidArgument,
         "model has no " + branch_prefix(b) + " branch");
  }
  return stack_view(branch_prefix(b), 2 * config_.hidden_size);
}

engine::HeadView Model::head_view(Branch b) const {
  if (!has_branch(b)) {
    fail(ErrorCode::InvalidArgument,
         "model has no " + head_prefix(b) + " branch");
  }
  const std::string p = head_prefix(b);
  engine::HeadView v;
  v.d_in = int(2 * config_.hidden_size);
  v.d1 = int(config_.hidden_size);
  v.d2 = int(config_.hidden_size / 2);
  const auto& w1 = store_.spec(p + ".fc1.w");
  const auto& b1 = store_.spec(p + ".fc1.b");
  const auto& w2 = store_.spec(p + ".fc2.w");
  const auto& b2 = store_.spec(p + ".fc2.b");
  const auto& w3 = store_.spec(p + ".fc3.w");
  const auto& b3 = store_.spec(p + ".fc3.b");
  const double* base = store_.raw().data();
  v.w1 = base + w1.offset; v.w1_off = w1.offset;
  v.b1 = base + b1.offset; v.b1_off = b1.offset;
  v.w2 = base + w2.offset; v.w2_off = w2.offset;
  v.b2 = base + b2.offset; v.b2_off = b2.offset;
  v.w3 = base + w3.offset; v.w3_off = w3.offset;
  v.b3 = base + b3.offset; v.b3_off = b3.offset;
  return v;
}

engine::SlabInput Model::slab_from_input(const PaddedInput& input) const {
  input.validate();
  if (input.length() != config_.input_len ||
      input.channels() != config_.input_channels) {
    fail(ErrorCode::Dimension,
         "input window is " + std::to_string(input.length()) + "x" +
             std::to_string(input.channels()) + ", model expects " +
             std::to_string(config_.input_len) + "x" +
             std::to_string(config_.input_channels));
  }
  engine::SlabInput slab;
  slab.T = int(config_.input_len);
  slab.t0 = int(input.valid_from);
  slab.B = 1;
  slab.C = int(config_.input_channels);
  slab.valid_from = {int(input.valid_from)};
  slab.x.assign(std::size_t(slab.C) * slab.steps(), 0.0);
  for (int u = 0; u < slab.steps(); ++u) {
    for (int c = 0; c < slab.C; ++c) {
      slab.x[std::size_t(u) * slab.C + c] =
          input.values.at(input.valid_from + u, c) + kInputShift;
    }
  }
  slab.build_k_at();
  return slab;
}

std::vector<double> Model::encode(const PaddedInput& input,
                                  ForwardStats* stats) const {
  engine::SlabInput slab = slab_from_input(input);
  engine::StackCache cache;
  std::vector<double> c;
  stack_encode_forward(encoder_view(), slab, cache, c);
  if (stats) stats->encoder_passes++;
  return c;
}

std::vector<double> Model::decode(const std::vector<double>& c, Branch branch,
                                  ForwardStats* stats) const {
  const std::size_t ch = 2 * config_.hidden_size;
  if (c.size() != ch) {
    fail(ErrorCode::Dimension, "hidden vector has length " +
                                   std::to_string(c.size()) + ", expected " +
                                   std::to_string(ch));
  }
  engine::StackCache cache;
  stack_decode_forward(decoder_view(branch), c, 1, int(config_.output_len),
                       cache);
  engine::HeadCache hc;
  std::vector<double> out;
  head_forward(head_view(branch), cache.out.back().data(),
               int(config_.output_len), hc, out);
  if (stats) {
    (branch == Branch::Capacity ? stats->decoder_passes_cap
                                : stats->decoder_passes_res)++;
  }
  return out;
}

TrajectoryPrediction Model::forward_full(const PaddedInput& input,
                                         ForwardStats* stats) const {
  const std::vector<double> c = encode(input, stats);
  TrajectoryPrediction pred;
  if (has_branch(Branch::Capacity)) {
    pred.capacity = decode(c, Branch::Capacity, stats);
  }
  if (has_branch(Branch::Resistance)) {
    pred.resistance = decode(c, Branch::Resistance, stats);
  }
  return pred;
}

TrajectoryPrediction Model::predict(const CellSeries& series,
                                    std::size_t at_cycle,
                                    ForwardStats* stats) const {
  if (norm_.r_base <= 0.0 && kind_ != ModelKind::StlCapacity) {
    fail(ErrorCode::InvalidArgument,
         "model has no resistance base; train or load a checkpoint first");
  }
  PaddedInput input;
  if (kind_ == ModelKind::Mtl) {
    input = mask_and_concat(
        build_input_window(series.soh_c(norm_.q_nominal), at_cycle, config_),
        build_input_window(series.soh_r(norm_.r_base), at_cycle, config_));
  } else if (kind_ == ModelKind::StlCapacity) {
    input =
        build_input_window(series.soh_c(norm_.q_nominal), at_cycle, config_);
  } else {
    input = build_input_window(series.soh_r(norm_.r_base), at_cycle, config_);
  }

  TrajectoryPrediction pred = forward_full(input, stats);
  pred.start_cycle = long(at_cycle);

  // Clip at the first implausible point in either channel.
  std::size_t n = std::max(pred.capacity.size(), pred.resistance.size());
  std::size_t cut = n;
  for (std::size_t i = 0; i < n; ++i) {
    const bool bad_cap =
        i < pred.capacity.size() && pred.capacity[i] < kSohCapFloor;
    const bool bad_res =
        i < pred.resistance.size() && pred.resistance[i] > kSohResCeil;
    if (bad_cap || bad_res) {
      cut = i;
      break;
    }
  }
  if (cut < pred.capacity.size()) pred.capacity.resize(cut);
  if (cut < pred.resistance.size()) pred.resistance.resize(cut);
  return pred;
}

}  // namespace bdp
