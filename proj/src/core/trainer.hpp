#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/sampling.hpp"

namespace bdp {

struct StageConfig {
  double lr = 1e-4;
  std::size_t max_epochs = 450;
  std::size_t batch_size = 384;
  double w_cap = 1.0;
  double w_res = 0.0;
  std::size_t early_stop_patience = 32;
  double early_stop_min_delta = 1e-5;

  void validate() const;
};

// Which parameters a stage trains.
enum class StageScope { EncoderAndCapacity, ResistanceDecoder, All };

std::vector<std::string> scope_prefixes(StageScope scope, ModelKind kind);

struct EpochRecord {
  int stage = 0;
  int epoch = 0;  // 1-based within the stage
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct TrainOptions {
  std::uint64_t seed = 0;
  double clip_norm = 5.0;       // global gradient-norm clip
  std::size_t block_cols = 48;  // engine block width
  std::function<void(int stage, StageScope scope)> on_stage;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct LossBreakdown {
  double mae_cap = 0.0;  // pooled masked MAE over all valid positions
  double mae_res = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

// Loss (and optionally gradients) of the weighted masked-MAE objective over
// the given samples. The masked MAE pools |error| over every valid target
// position in the set. When `grads` is non-null it must be zeroed and sized
// like the parameter vector; the regularization penalty over `penalty_ranges`
// is included in `total` and its gradient accumulated.
LossBreakdown batch_loss_grad(
    const Model& model, const std::vector<TrainingSample>& samples,
    const std::vector<std::size_t>& indices, double w_cap, double w_res,
    const std::vector<std::pair<std::size_t, std::size_t>>& penalty_ranges,
    bool encoder_backward, std::span<double> grads, std::size_t block_cols);

// Runs one stage: Adam on the scope's parameters, epoch shuffling from the
// seeded stream, early stopping on the stage's own weighted validation MAE
// (no penalty), returning the best-validation snapshot in the model.
void train_stage(Model& model, const std::vector<TrainingSample>& train,
                 const std::vector<TrainingSample>& val,
                 const StageConfig& stage, StageScope scope, int stage_no,
                 const TrainOptions& opts, std::vector<EpochRecord>& history);

// The three-stage multi-task schedule: capacity loss through encoder and
// capacity branch, then the resistance branch alone with a frozen encoder,
// then everything on the weighted total loss.
std::vector<EpochRecord> train_multistage(
    Model& model, const std::vector<TrainingSample>& train,
    const std::vector<TrainingSample>& val,
    const std::vector<StageConfig>& stages, const TrainOptions& opts);

// Single-stage single-task training over all parameters.
std::vector<EpochRecord> train_stl(Model& model,
                                   const std::vector<TrainingSample>& train,
                                   const std::vector<TrainingSample>& val,
                                   const StageConfig& stage,
                                   const TrainOptions& opts);

std::vector<StageConfig> default_mtl_stages();
StageConfig default_stl_stage();

}  // namespace bdp
