#pragma once

#include <cstdint>
#include <vector>

#include "core/config.hpp"
#include "core/series.hpp"
#include "core/window.hpp"

namespace bdp {

struct SplitSpec {
  std::uint64_t seed = 0;
  double val_fraction = 0.2;
  double test_fraction = 0.2;
};

struct DatasetSplit {
  std::vector<CellSeries> train, val, test;
};

// Deterministic shuffle by seed, then val/test take round(fraction*N) cells
// each and the remainder trains (48 cells -> 28/10/10).
DatasetSplit split_dataset(std::vector<CellSeries> cells,
                           const SplitSpec& spec);

// One supervised example: an input window at some present cycle plus the
// remaining trajectory at out-step resolution, padded and masked.
struct TrainingSample {
  PaddedInput input;                      // input_len x channels
  std::vector<double> target_cap;         // output_len, zero where masked
  std::vector<double> target_res;         // output_len
  std::vector<std::uint8_t> target_mask;  // 1 where the target is real
  std::size_t present_cycle = 0;
  std::size_t cell_index = 0;  // position in the originating cell list
};

// Samples for one cell: one per present cycle from 100 to the end of data in
// 20-cycle strides. Inputs resample the normalized history every
// in_step_cycles; targets cover (present, end] every out_step_cycles.
// The series must carry r_base (for MTL/STL-resistance sampling).
std::vector<TrainingSample> build_samples(const CellSeries& cell,
                                          const ModelConfig& config,
                                          ModelKind kind);

// Mean absolute error over the true-mask positions only.
double masked_mae(const std::vector<double>& pred,
                  const std::vector<double>& target,
                  const std::vector<std::uint8_t>& mask);

}  // namespace bdp
