#include "core/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/adam.hpp"

namespace bdp {

void StageConfig::validate() const {
  if (!(lr >= 0.0) || batch_size == 0 || max_epochs == 0) {
    fail(ErrorCode::InvalidArgument, "bad stage config");
  }
  if (w_cap < 0.0 || w_res < 0.0 || (w_cap == 0.0 && w_res == 0.0)) {
    fail(ErrorCode::InvalidArgument,
         "stage loss weights must be >= 0 and not both zero");
  }
}

std::vector<std::string> scope_prefixes(StageScope scope, ModelKind kind) {
  if (kind != ModelKind::Mtl) {
    // Single-task models always train everything they have.
    return {""};
  }
  switch (scope) {
    case StageScope::EncoderAndCapacity:
      return {"encoder", "decoder_cap", "head_cap"};
    case StageScope::ResistanceDecoder:
      return {"decoder_res", "head_res"};
    case StageScope::All:
      return {""};
  }
  fail(ErrorCode::InvalidArgument, "bad stage scope");
}

namespace {

struct BlockLayout {
  engine::SlabInput slab;
  std::vector<std::size_t> sample_idx;  // column -> sample index
};

BlockLayout build_block(const Model& model,
                        const std::vector<TrainingSample>& samples,
                        const std::vector<std::size_t>& cols) {
  const ModelConfig& cfg = model.config();
  BlockLayout block;
  block.sample_idx = cols;
  engine::SlabInput& slab = block.slab;
  slab.T = int(cfg.input_len);
  slab.B = int(cols.size());
  slab.C = int(cfg.input_channels);
  slab.valid_from.resize(cols.size());
  int t0 = slab.T;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    slab.valid_from[j] = int(samples[cols[j]].input.valid_from);
    t0 = std::min(t0, slab.valid_from[j]);
  }
  slab.t0 = t0;
  const int U = slab.steps();
  slab.x.assign(std::size_t(slab.C) * U * slab.B, 0.0);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const PaddedInput& in = samples[cols[j]].input;
    for (std::size_t t = in.valid_from; t < cfg.input_len; ++t) {
      const std::size_t u = t - std::size_t(t0);
      for (std::size_t c = 0; c < cfg.input_channels; ++c) {
        slab.x[(u * cols.size() + j) * cfg.input_channels + c] =
            in.values.at(t, c) + Model::kInputShift;
      }
    }
  }
  slab.build_k_at();
  return block;
}

std::vector<std::size_t> sorted_by_valid_from(
    const std::vector<TrainingSample>& samples,
    const std::vector<std::size_t>& indices) {
  std::vector<std::size_t> out = indices;
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].input.valid_from < samples[b].input.valid_from;
  });
  return out;
}

}  // namespace

LossBreakdown batch_loss_grad(
    const Model& model, const std::vector<TrainingSample>& samples,
    const std::vector<std::size_t>& indices, double w_cap, double w_res,
    const std::vector<std::pair<std::size_t, std::size_t>>& penalty_ranges,
    bool encoder_backward, std::span<double> grads, std::size_t block_cols) {
  const ModelConfig& cfg = model.config();
  const bool want_cap = w_cap > 0.0 && model.has_branch(Branch::Capacity);
  const bool want_res = w_res > 0.0 && model.has_branch(Branch::Resistance);
  if (!want_cap && !want_res) {
    fail(ErrorCode::InvalidArgument, "no active loss branch");
  }

  // Valid-position count over the whole set; the masked MAE pools over it.
  std::size_t n_valid = 0;
  for (std::size_t idx : indices) {
    const auto& m = samples[idx].target_mask;
    n_valid += std::size_t(std::count(m.begin(), m.end(), std::uint8_t(1)));
  }

  LossBreakdown out;
  const bool with_grads = !grads.empty();
  const int T_out = int(cfg.output_len);

  const std::vector<std::size_t> order = sorted_by_valid_from(samples, indices);
  engine::StackCache enc_cache, dec_cache;
  engine::HeadCache head_cache;
  std::vector<double> c, yhat, dy, d_top, dc;

  for (std::size_t begin = 0; begin < order.size(); begin += block_cols) {
    const std::size_t end = std::min(order.size(), begin + block_cols);
    const std::vector<std::size_t> cols(order.begin() + begin,
                                        order.begin() + end);
    BlockLayout block = build_block(model, samples, cols);
    const int B = block.slab.B;

    stack_encode_forward(model.encoder_view(), block.slab, enc_cache, c);
    if (with_grads) dc.assign(c.size(), 0.0);

    for (Branch branch : {Branch::Capacity, Branch::Resistance}) {
      const bool active = branch == Branch::Capacity ? want_cap : want_res;
      if (!active) continue;
      const double w = branch == Branch::Capacity ? w_cap : w_res;

      stack_decode_forward(model.decoder_view(branch), c, B, T_out, dec_cache);
      head_forward(model.head_view(branch), dec_cache.out.back().data(),
                   T_out * B, head_cache, yhat);

      double abs_sum = 0.0;
      if (with_grads) dy.assign(yhat.size(), 0.0);
      for (int j = 0; j < B; ++j) {
        const TrainingSample& s = samples[block.sample_idx[std::size_t(j)]];
        const auto& target = branch == Branch::Capacity ? s.target_cap
                                                        : s.target_res;
        for (int u = 0; u < T_out; ++u) {
          if (!s.target_mask[std::size_t(u)]) continue;
          const double e =
              yhat[std::size_t(u) * B + j] - target[std::size_t(u)];
          abs_sum += std::abs(e);
          if (with_grads && n_valid > 0) {
            const double sign = e > 0 ? 1.0 : (e < 0 ? -1.0 : 0.0);
            dy[std::size_t(u) * B + j] = w * sign / double(n_valid);
          }
        }
      }
      (branch == Branch::Capacity ? out.mae_cap : out.mae_res) += abs_sum;

      if (with_grads) {
        d_top.assign(dec_cache.out.back().size(), 0.0);
        head_backward(model.head_view(branch), dec_cache.out.back().data(),
                      T_out * B, head_cache, dy, grads, d_top);
        stack_decode_backward(model.decoder_view(branch), c, B, T_out,
                              dec_cache, d_top, grads, dc);
      }
    }

    if (with_grads && encoder_backward) {
      stack_encode_backward(model.encoder_view(), block.slab, enc_cache, dc,
                            grads);
    }
  }

  if (n_valid > 0) {
    out.mae_cap /= double(n_valid);
    out.mae_res /= double(n_valid);
  }
  out.total = w_cap * out.mae_cap + w_res * out.mae_res;
  if (!penalty_ranges.empty()) {
    if (with_grads) {
      out.penalty = regularization_accumulate(model.params().values(),
                                              model.reg(), penalty_ranges,
                                              grads);
    } else {
      std::vector<double> scratch(model.params().total_size(), 0.0);
      out.penalty = regularization_accumulate(model.params().values(),
                                              model.reg(), penalty_ranges,
                                              scratch);
    }
    out.total += out.penalty;
  }
  return out;
}

void train_stage(Model& model, const std::vector<TrainingSample>& train,
                 const std::vector<TrainingSample>& val,
                 const StageConfig& stage, StageScope scope, int stage_no,
                 const TrainOptions& opts, std::vector<EpochRecord>& history) {
  stage.validate();
  if (train.empty() || val.empty()) {
    fail(ErrorCode::InvalidArgument, "train_stage needs train and val samples");
  }
  const auto prefixes = scope_prefixes(scope, model.kind());
  const auto trainable = model.ranges(prefixes);
  const bool encoder_trainable =
      model.kind() != ModelKind::Mtl || scope != StageScope::ResistanceDecoder;

  if (opts.on_stage) opts.on_stage(stage_no, scope);

  AdamState adam(model.params().total_size(), stage.lr);
  SeededRng shuffle_rng = SeededRng(opts.seed).split(
      "train-stage-" + std::to_string(stage_no));

  std::vector<double> grads(model.params().total_size(), 0.0);
  std::vector<double> best_params(model.params().raw());
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  std::vector<std::size_t> perm(train.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> val_idx(val.size());
  std::iota(val_idx.begin(), val_idx.end(), 0);

  for (std::size_t epoch = 1; epoch <= stage.max_epochs; ++epoch) {
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      const std::size_t j = std::size_t(shuffle_rng.next_u64() % (i + 1));
      std::swap(perm[i], perm[j]);
    }

    double train_loss_acc = 0.0;
    std::size_t seen = 0;
    for (std::size_t begin = 0; begin < perm.size();
         begin += stage.batch_size) {
      const std::size_t end = std::min(perm.size(), begin + stage.batch_size);
      const std::vector<std::size_t> batch(perm.begin() + begin,
                                           perm.begin() + end);
      std::fill(grads.begin(), grads.end(), 0.0);
      const LossBreakdown loss = batch_loss_grad(
          model, train, batch, stage.w_cap, stage.w_res, trainable,
          encoder_trainable, grads, opts.block_cols);
      if (!std::isfinite(loss.total)) {
        fail(ErrorCode::Numeric,
             "training diverged at stage " + std::to_string(stage_no) +
                 " epoch " + std::to_string(epoch) + " (loss " +
                 std::to_string(loss.total) + ")");
      }

      if (opts.clip_norm > 0.0) {
        double sq = 0.0;
        for (const auto& [off, len] : trainable) {
          for (std::size_t k = off; k < off + len; ++k)
            sq += grads[k] * grads[k];
        }
        const double norm = std::sqrt(sq);
        if (norm > opts.clip_norm) {
          const double scale = opts.clip_norm / norm;
          for (const auto& [off, len] : trainable) {
            for (std::size_t k = off; k < off + len; ++k) grads[k] *= scale;
          }
        }
      }
      adam_step_ranges(model.params().values(), grads, adam, trainable);
      train_loss_acc += loss.total * double(batch.size());
      seen += batch.size();
    }

    const LossBreakdown vb =
        batch_loss_grad(model, val, val_idx, stage.w_cap, stage.w_res, {},
                        false, {}, opts.block_cols);
    const double val_loss = vb.total;  // weighted MAE, no penalty
    if (!std::isfinite(val_loss)) {
      fail(ErrorCode::Numeric, "validation loss diverged at stage " +
                                   std::to_string(stage_no) + " epoch " +
                                   std::to_string(epoch));
    }

    EpochRecord rec;
    rec.stage = stage_no;
    rec.epoch = int(epoch);
    rec.train_loss = train_loss_acc / double(seen);
    rec.val_loss = val_loss;
    rec.lr = stage.lr;
    history.push_back(rec);
    if (opts.on_epoch) opts.on_epoch(rec);

    if (val_loss < best_val - stage.early_stop_min_delta) {
      best_val = val_loss;
      best_params = model.params().raw();
      since_best = 0;
    } else {
      ++since_best;
      if (since_best >= stage.early_stop_patience) break;
    }
  }

  model.params().raw() = best_params;  // best-validation snapshot
}

std::vector<EpochRecord> train_multistage(
    Model& model, const std::vector<TrainingSample>& train,
    const std::vector<TrainingSample>& val,
    const std::vector<StageConfig>& stages, const TrainOptions& opts) {
  if (model.kind() != ModelKind::Mtl) {
    fail(ErrorCode::InvalidArgument, "multistage training is for MTL models");
  }
  if (stages.size() != 3) {
    fail(ErrorCode::InvalidArgument, "multistage training takes 3 stages");
  }
  std::vector<EpochRecord> history;
  train_stage(model, train, val, stages[0], StageScope::EncoderAndCapacity, 1,
              opts, history);
  train_stage(model, train, val, stages[1], StageScope::ResistanceDecoder, 2,
              opts, history);
  train_stage(model, train, val, stages[2], StageScope::All, 3, opts, history);
  return history;
}

std::vector<EpochRecord> train_stl(Model& model,
                                   const std::vector<TrainingSample>& train,
                                   const std::vector<TrainingSample>& val,
                                   const StageConfig& stage,
                                   const TrainOptions& opts) {
  if (model.kind() == ModelKind::Mtl) {
    fail(ErrorCode::InvalidArgument, "train_stl is for single-task models");
  }
  StageConfig st = stage;  // the loss follows the model's own channel
  st.w_cap = model.kind() == ModelKind::StlCapacity ? 1.0 : 0.0;
  st.w_res = 1.0 - st.w_cap;
  std::vector<EpochRecord> history;
  train_stage(model, train, val, st, StageScope::All, 1, opts, history);
  return history;
}

std::vector<StageConfig> default_mtl_stages() {
  StageConfig s1;  // capacity MAE through encoder + capacity branch
  s1.lr = 1e-4;
  s1.max_epochs = 450;
  s1.batch_size = 384;
  s1.w_cap = 1.0;
  s1.w_res = 0.0;
  StageConfig s2 = s1;  // resistance MAE, encoder frozen
  s2.w_cap = 0.0;
  s2.w_res = 1.0;
  StageConfig s3;  // total MAE
  s3.lr = 1e-5;
  s3.max_epochs = 300;
  s3.batch_size = 512;
  s3.w_cap = 1.0;
  s3.w_res = 1.0;
  return {s1, s2, s3};
}

StageConfig default_stl_stage() {
  StageConfig s;
  s.lr = 1e-4;
  s.max_epochs = 450;
  s.batch_size = 384;
  return s;
}

}  // namespace bdp
