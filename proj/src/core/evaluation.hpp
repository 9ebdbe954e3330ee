#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/kneepoint.hpp"
#include "core/model.hpp"
#include "core/series.hpp"

namespace bdp {

struct EolThresholds {
  double cap_first = 0.80;   // of q_nominal
  double cap_second = 0.65;
  double res_first = 1.20;   // of r_base
  double res_second = 1.30;

  void validate() const;
};

// (1/n) * sum |pred-truth| / |truth| * 100. Truth entries must be nonzero.
double mape(const std::vector<double>& pred, const std::vector<double>& truth);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// First crossing of threshold_fraction*base in the given direction, with
// linear interpolation between grid points. Absence is a result.
std::optional<double> eol_cycle(const std::vector<double>& cycles,
                                const std::vector<double>& values,
                                double threshold_fraction, double base,
                                bool falling);

// Anything that can produce full-horizon SOH trajectories; lets the
// evaluation protocol run against the trained model or a ground-truth
// oracle alike.
class TrajectoryPredictor {
 public:
  virtual ~TrajectoryPredictor() = default;
  virtual TrajectoryPrediction predict_full(const CellSeries& series,
                                            std::size_t at_cycle) const = 0;
  virtual const ModelConfig& predictor_config() const = 0;
};

class ModelPredictor : public TrajectoryPredictor {
 public:
  explicit ModelPredictor(const Model& model) : model_(model) {}
  TrajectoryPrediction predict_full(const CellSeries& series,
                                    std::size_t at_cycle) const override;
  const ModelConfig& predictor_config() const override {
    return model_.config();
  }
  const Model& model() const { return model_; }

 private:
  const Model& model_;
};

// True degradation metrics of one cell, either from synthetic ground truth
// or extracted from the reference series.
struct CellTruth {
  std::optional<double> knee_cap, knee_res;
  std::optional<double> eol80, eol65, eol120, eol130;
};

CellTruth extract_truth(const CellSeries& series, const EolThresholds& thr,
                        const SmoothingSpec& smoothing);

struct PositionRecord {
  std::string cell_id;
  std::size_t present_cycle = 0;
  char channel = 'C';  // 'C' capacity, 'R' resistance
  std::size_t n_points = 0;
  double mape_pct = 0.0;
  double mae_phys = 0.0;  // Ah or mOhm
  std::optional<double> pred_eol_first, pred_eol_second, pred_knee;
  std::optional<double> err_eol_first, err_eol_second, err_knee;
};

struct ChannelAggregates {
  std::size_t n_curves = 0;
  double mean_mape = 0.0, median_mape = 0.0, max_mape = 0.0;
  double mean_mae = 0.0, median_mae = 0.0, max_mae = 0.0;
  std::optional<double> median_knee_err, median_eol_first_err,
      median_eol_second_err;
};

struct MetricsReport {
  std::vector<PositionRecord> records;
  ChannelAggregates capacity, resistance;
  bool has_capacity = false, has_resistance = false;
  double mean_seconds_per_prediction = 0.0;
};

// Recomputes the aggregate block from the stored records (consistency check
// and the way aggregates are produced in the first place).
ChannelAggregates aggregate_channel(const std::vector<PositionRecord>& records,
                                    char channel);

struct EvalOptions {
  EolThresholds thresholds;
  SmoothingSpec truth_smoothing{25};   // for knees on per-cycle references
  SmoothingSpec pred_smoothing{1};     // for knees on out-step predictions
  std::size_t position_stride = 20;    // cycles between evaluated positions
  // Per-cell ground truth; cells missing here fall back to extract_truth.
  std::map<std::string, CellTruth> truth;
  // Reference gradients for online knee identification (SOH per cycle).
  double knee_grad_cap = 0.0;
  double knee_grad_res = 0.0;
};

// The full progression protocol: every test cell, every present-cycle
// position from 100 in `position_stride` steps; curve errors clipped to the
// cell's true remaining length, point metrics from the full predicted curve.
MetricsReport progression_eval(const TrajectoryPredictor& predictor,
                               const std::vector<CellSeries>& cells,
                               const EvalOptions& options);

// progression_eval under input noise of each sigma; the same underlying
// noise stream is reused across sigmas for comparability.
std::vector<std::pair<double, MetricsReport>> noise_sweep(
    const TrajectoryPredictor& predictor, const std::vector<CellSeries>& cells,
    const std::vector<double>& sigma_grid, std::uint64_t noise_seed,
    const EvalOptions& options);

struct TimingResult {
  double mean_seconds = 0.0;
  std::size_t repetitions = 0;
};

// Mean wall time of one prediction (input-window preprocessing + forward
// pass), measured single-threaded over >= n_reps warm calls cycling through
// the given cells at their last evaluable position.
TimingResult measure_prediction_seconds(const TrajectoryPredictor& predictor,
                                        const std::vector<CellSeries>& cells,
                                        std::size_t n_reps);

struct ComparisonRow {
  std::string name;
  double stl = 0.0;
  double mtl = 0.0;
};

// Side-by-side accuracy and compute table (13 rows); the STL column joins
// the capacity model's capacity metrics with the resistance model's
// resistance metrics, and the cost row sums the two STL predictions.
std::vector<ComparisonRow> compare_mtl_stl(const MetricsReport& mtl,
                                           const MetricsReport& stl_cap,
                                           const MetricsReport& stl_res,
                                           const TimingResult& mtl_time,
                                           const TimingResult& stl_cap_time,
                                           const TimingResult& stl_res_time);

struct DegradationMetricsRow {
  std::string cell_id;
  // CapKneeX, CapKneeY, ResKneeX, ResKneeY, EOL80, EOL65, EOL120, EOL130
  std::array<std::optional<double>, 8> metrics;
};

struct DegradationMetricsTable {
  std::vector<DegradationMetricsRow> rows;
  // Pairwise Pearson matrix over cells where both metrics exist; absent for
  // single-cell inputs.
  std::optional<std::array<std::array<double, 8>, 8>> rho;
  static const std::array<const char*, 8> kColumns;
};

DegradationMetricsTable degradation_metrics(
    const std::vector<CellSeries>& cells, const EolThresholds& thr,
    const SmoothingSpec& smoothing);

}  // namespace bdp
