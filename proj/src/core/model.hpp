#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/engine.hpp"
#include "core/params.hpp"
#include "core/regularization.hpp"
#include "core/rng.hpp"
#include "core/window.hpp"

namespace bdp {

enum class Branch { Capacity, Resistance };

// Normalization constants and knee references captured at training time and
// carried with the checkpoint.
struct NormInfo {
  double q_nominal = 1.85;   // Ah
  double r_base = 0.0;       // mOhm, fleet mean initial resistance
  double knee_grad_cap = 0.0;  // |d soh / d cycle| references for online
  double knee_grad_res = 0.0;  // knee identification (0 = not calibrated)
};

struct SplitInfo {
  std::vector<std::string> train, val, test;
};

// Per-call pass counters; tests assert the one-shot property through these.
struct ForwardStats {
  int encoder_passes = 0;
  int decoder_passes_cap = 0;
  int decoder_passes_res = 0;
};

class CellSeries;  // series.hpp

// The sequence-to-sequence model. In multi-task form one shared encoder
// feeds two decoder+head branches; the single-task form keeps one branch.
class Model {
 public:
  Model() = default;
  Model(ModelKind kind, const ModelConfig& config,
        const RegularizationSpec& reg);

  void init_params(SeededRng& rng);

  ModelKind kind() const { return kind_; }
  const ModelConfig& config() const { return config_; }
  const RegularizationSpec& reg() const { return reg_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }
  NormInfo& norm() { return norm_; }
  const NormInfo& norm() const { return norm_; }
  SplitInfo& split() { return split_; }
  const SplitInfo& split() const { return split_; }

  bool has_branch(Branch b) const;

  // Engine views over the parameter arena.
  engine::StackView encoder_view() const;
  engine::StackView decoder_view(Branch b) const;
  engine::HeadView head_view(Branch b) const;

  // Parameter ranges by component, for stage-wise freezing and penalties.
  std::vector<std::pair<std::size_t, std::size_t>> ranges(
      const std::vector<std::string>& prefixes) const {
    return store_.ranges_for_prefixes(prefixes);
  }

  // Single-sequence operations (column count 1).
  std::vector<double> encode(const PaddedInput& input,
                             ForwardStats* stats = nullptr) const;
  std::vector<double> decode(const std::vector<double>& c, Branch branch,
                             ForwardStats* stats = nullptr) const;

  // Full one-shot forward: every configured branch, all output_len steps.
  TrajectoryPrediction forward_full(const PaddedInput& input,
                                    ForwardStats* stats = nullptr) const;

  // One-shot trajectory prediction from raw per-cycle history; normalizes
  // with the model's stored constants, then clips the emitted trajectory at
  // the first implausible point (SOH-C < 0.4 or SOH-R > 2.0).
  TrajectoryPrediction predict(const CellSeries& series,
                               std::size_t at_cycle,
                               ForwardStats* stats = nullptr) const;

  std::size_t parameter_count() const { return store_.total_size(); }

  static constexpr double kSohCapFloor = 0.4;
  static constexpr double kSohResCeil = 2.0;

  // Inputs are shifted by -1 over the valid region before entering the
  // recurrence so the network sees roughly centered values; padding stays 0.
  static constexpr double kInputShift = -1.0;

 private:
  void register_tensors();
  void register_stack(const std::string& prefix, std::size_t d0);
  void register_head(const std::string& prefix);
  engine::StackView stack_view(const std::string& prefix, std::size_t d0) const;
  engine::SlabInput slab_from_input(const PaddedInput& input) const;

  ModelKind kind_ = ModelKind::Mtl;
  ModelConfig config_;
  RegularizationSpec reg_;
  ParamStore store_;
  NormInfo norm_;
  SplitInfo split_;
};

std::string branch_prefix(Branch b);  // "decoder_cap" / "decoder_res"
std::string head_prefix(Branch b);    // "head_cap" / "head_res"

}  // namespace bdp
