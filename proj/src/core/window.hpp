#pragma once

#include <cstddef>
#include <vector>

#include "core/config.hpp"
#include "core/matrix.hpp"

namespace bdp {

// A fixed-length input window in normalized units. Leading positions up to
// valid_from are exactly zero; real values are strictly positive, so padding
// is always distinguishable from data.
struct PaddedInput {
  Matrix2D values;            // input_len x channels, row-major
  std::size_t valid_from = 0;  // index of the first real timestep

  std::size_t length() const { return values.rows; }
  std::size_t channels() const { return values.cols; }
  std::size_t valid_steps() const { return values.rows - valid_from; }

  void validate() const;
};

// Merges two single-channel windows into one two-channel window, keeping the
// shared mask. Errors if the masks or lengths disagree or nothing is valid.
PaddedInput mask_and_concat(const PaddedInput& cap_in,
                            const PaddedInput& res_in);

// Builds the model input window from normalized per-cycle histories
// (index = cycle). Values are sampled every `in_step_cycles` cycles at
// cycles step, 2*step, ..., up to `present_cycle`, then left-padded.
// `soh` series must cover [0, present_cycle].
PaddedInput build_input_window(const std::vector<double>& soh,
                               std::size_t present_cycle,
                               const ModelConfig& config);

struct TrajectoryPrediction {
  std::vector<double> capacity;    // normalized SOH-C per out-step
  std::vector<double> resistance;  // normalized SOH-R per out-step
  long start_cycle = 0;            // present cycle; point i sits at
                                   // start_cycle + (i+1)*out_step_cycles

  long cycle_at(std::size_t i, const ModelConfig& cfg) const {
    return start_cycle + long((i + 1) * cfg.out_step_cycles);
  }
};

}  // namespace bdp
