#include "core/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace bdp {

DatasetSplit split_dataset(std::vector<CellSeries> cells,
                           const SplitSpec& spec) {
  const std::size_t n = cells.size();
  if (n < 5) {
    fail(ErrorCode::InvalidArgument,
         "need at least 5 cells to split, got " + std::to_string(n));
  }
  // Fisher-Yates with the split stream.
  SeededRng rng = SeededRng(spec.seed).split("dataset-split");
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = std::size_t(rng.next_u64() % (i + 1));
    std::swap(cells[i], cells[j]);
  }
  const auto bucket = [&](double fraction) {
    return std::size_t(std::floor(fraction * double(n) + 0.5));
  };
  const std::size_t n_val = bucket(spec.val_fraction);
  const std::size_t n_test = bucket(spec.test_fraction);
  if (n_val + n_test >= n) {
    fail(ErrorCode::InvalidArgument, "split fractions leave no training cells");
  }
  DatasetSplit split;
  split.test.assign(cells.begin(), cells.begin() + n_test);
  split.val.assign(cells.begin() + n_test, cells.begin() + n_test + n_val);
  split.train.assign(cells.begin() + n_test + n_val, cells.end());
  return split;
}

std::vector<TrainingSample> build_samples(const CellSeries& cell,
                                          const ModelConfig& config,
                                          ModelKind kind) {
  const std::size_t last = cell.last_cycle();
  if (last < kMinHistoryCycles) {
    fail(ErrorCode::InvalidArgument,
         "cell " + cell.cell_id + " covers only " + std::to_string(last) +
             " cycles; need " + std::to_string(kMinHistoryCycles));
  }
  const std::vector<double> soh_c = cell.soh_c(cell.q_nominal);
  std::vector<double> soh_r;
  if (kind != ModelKind::StlCapacity) {
    soh_r = cell.soh_r(cell.r_base);  // errors if r_base unset
  }

  std::vector<TrainingSample> samples;
  for (std::size_t present = kMinHistoryCycles;
       present <= last && present <= config.max_history_cycles();
       present += config.out_step_cycles) {
    TrainingSample s;
    s.present_cycle = present;
    switch (kind) {
      case ModelKind::Mtl:
        s.input = mask_and_concat(build_input_window(soh_c, present, config),
                                  build_input_window(soh_r, present, config));
        break;
      case ModelKind::StlCapacity:
        s.input = build_input_window(soh_c, present, config);
        break;
      case ModelKind::StlResistance:
        s.input = build_input_window(soh_r, present, config);
        break;
    }

    s.target_cap.assign(config.output_len, 0.0);
    s.target_res.assign(config.output_len, 0.0);
    s.target_mask.assign(config.output_len, 0);
    const std::size_t steps = (last - present) / config.out_step_cycles;
    for (std::size_t j = 0; j < steps && j < config.output_len; ++j) {
      const std::size_t cycle = present + (j + 1) * config.out_step_cycles;
      s.target_mask[j] = 1;
      s.target_cap[j] = soh_c[cycle];
      if (kind != ModelKind::StlCapacity) s.target_res[j] = soh_r[cycle];
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

double masked_mae(const std::vector<double>& pred,
                  const std::vector<double>& target,
                  const std::vector<std::uint8_t>& mask) {
  if (pred.size() != target.size() || pred.size() != mask.size()) {
    fail(ErrorCode::Dimension, "masked_mae: length mismatch");
  }
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!mask[i]) continue;
    acc += std::abs(pred[i] - target[i]);
    ++count;
  }
  if (count == 0) {
    fail(ErrorCode::InvalidArgument, "masked_mae: mask selects no positions");
  }
  return acc / double(count);
}

}  // namespace bdp
