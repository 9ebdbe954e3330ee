#pragma once

#include <cstddef>
#include <string>

#include "core/errors.hpp"

namespace bdp {

enum class ModelKind { Mtl, StlCapacity, StlResistance };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// Architecture of the sequence-to-sequence stacks. The defaults are the
// production configuration: four bidirectional layers of 64 units, a
// 384-step input window at 5 cycles per step and a 128-step output horizon
// at 20 cycles per step.
struct ModelConfig {
  std::size_t num_layers = 4;
  std::size_t hidden_size = 64;
  std::size_t input_len = 384;
  std::size_t output_len = 128;
  std::size_t input_channels = 2;  // 2 for the multi-task model, 1 otherwise
  std::size_t in_step_cycles = 5;
  std::size_t out_step_cycles = 20;

  void validate() const {
    if (num_layers == 0 || hidden_size == 0 || input_len == 0 ||
        output_len == 0 || input_channels == 0 || in_step_cycles == 0 ||
        out_step_cycles == 0) {
      fail(ErrorCode::InvalidArgument, "model config sizes must be positive");
    }
  }

  // Longest raw history the input window can represent, in cycles.
  std::size_t max_history_cycles() const { return input_len * in_step_cycles; }

  bool operator==(const ModelConfig&) const = default;
};

// Minimum history required before a prediction is attempted.
inline constexpr std::size_t kMinHistoryCycles = 100;

}  // namespace bdp
