#include "core/window.hpp"

namespace bdp {

void PaddedInput::validate() const {
  if (values.rows == 0 || values.cols == 0) {
    fail(ErrorCode::InvalidArgument, "empty input window");
  }
  if (valid_from >= values.rows) {
    fail(ErrorCode::InvalidArgument, "empty input window (all padding)");
  }
  for (std::size_t t = 0; t < values.rows; ++t) {
    for (std::size_t c = 0; c < values.cols; ++c) {
      const double v = values.at(t, c);
      if (t < valid_from) {
        if (v != 0.0) {
          fail(ErrorCode::InvalidArgument,
               "padding positions must be exactly zero");
        }
      } else if (!(v > 0.0)) {
        fail(ErrorCode::InvalidArgument,
             "real window values must be strictly positive at step " +
                 std::to_string(t));
      }
    }
  }
}

PaddedInput mask_and_concat(const PaddedInput& cap_in,
                            const PaddedInput& res_in) {
  if (cap_in.length() != res_in.length()) {
    fail(ErrorCode::Dimension, "input channels have different lengths");
  }
  if (cap_in.valid_from != res_in.valid_from) {
    fail(ErrorCode::InvalidArgument,
         "input channels have different valid_from (" +
             std::to_string(cap_in.valid_from) + " vs " +
             std::to_string(res_in.valid_from) + ")");
  }
  if (cap_in.channels() != 1 || res_in.channels() != 1) {
    fail(ErrorCode::Dimension, "mask_and_concat expects single channels");
  }
  cap_in.validate();
  res_in.validate();

  PaddedInput merged;
  merged.valid_from = cap_in.valid_from;
  merged.values = Matrix2D(cap_in.length(), 2);
  for (std::size_t t = merged.valid_from; t < merged.values.rows; ++t) {
    merged.values.at(t, 0) = cap_in.values.at(t, 0);
    merged.values.at(t, 1) = res_in.values.at(t, 0);
  }
  return merged;
}

PaddedInput build_input_window(const std::vector<double>& soh,
                               std::size_t present_cycle,
                               const ModelConfig& config) {
  if (present_cycle < kMinHistoryCycles) {
    fail(ErrorCode::InvalidArgument,
         "insufficient history: " + std::to_string(present_cycle) +
             " cycles, need at least " + std::to_string(kMinHistoryCycles));
  }
  if (present_cycle > config.max_history_cycles()) {
    fail(ErrorCode::InvalidArgument,
         "history of " + std::to_string(present_cycle) +
             " cycles exceeds the input window of " +
             std::to_string(config.max_history_cycles()) + " cycles");
  }
  if (soh.size() <= present_cycle) {
    fail(ErrorCode::InvalidArgument,
         "series does not cover cycle " + std::to_string(present_cycle));
  }
  const std::size_t steps = present_cycle / config.in_step_cycles;
  PaddedInput win;
  win.values = Matrix2D(config.input_len, 1);
  win.valid_from = config.input_len - steps;
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t cycle = (k + 1) * config.in_step_cycles;
    win.values.at(win.valid_from + k, 0) = soh[cycle];
  }
  return win;
}

}  // namespace bdp
