#include "core/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace bdp {

void EolThresholds::validate() const {
  if (!(cap_second < cap_first) || !(res_second > res_first) ||
      !(cap_second > 0.0) || !(res_first > 0.0)) {
    fail(ErrorCode::InvalidArgument, "bad EOL thresholds");
  }
}

double mape(const std::vector<double>& pred, const std::vector<double>& truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    fail(ErrorCode::Dimension, "mape: length mismatch or empty input");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == 0.0) {
      fail(ErrorCode::InvalidArgument,
           "mape: zero truth entry at index " + std::to_string(i));
    }
    acc += std::abs((pred[i] - truth[i]) / truth[i]);
  }
  return acc / double(pred.size()) * 100.0;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    fail(ErrorCode::InvalidArgument, "pearson needs two equal series, len>=2");
  }
  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    fail(ErrorCode::InvalidArgument, "pearson: zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::optional<double> eol_cycle(const std::vector<double>& cycles,
                                const std::vector<double>& values,
                                double threshold_fraction, double base,
                                bool falling) {
  if (cycles.size() != values.size() || cycles.empty()) {
    fail(ErrorCode::Dimension, "eol_cycle: bad curve");
  }
  const double threshold = threshold_fraction * base;
  auto crossed = [&](double v) {
    return falling ? (v <= threshold) : (v >= threshold);
  };
  if (crossed(values[0])) return cycles[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!crossed(values[i])) continue;
    const double t = (threshold - values[i - 1]) / (values[i] - values[i - 1]);
    return cycles[i - 1] + t * (cycles[i] - cycles[i - 1]);
  }
  return std::nullopt;
}

TrajectoryPrediction ModelPredictor::predict_full(const CellSeries& series,
                                                  std::size_t at_cycle) const {
  const NormInfo& norm = model_.norm();
  PaddedInput input;
  const ModelConfig& cfg = model_.config();
  switch (model_.kind()) {
    case ModelKind::Mtl:
      input = mask_and_concat(
          build_input_window(series.soh_c(norm.q_nominal), at_cycle, cfg),
          build_input_window(series.soh_r(norm.r_base), at_cycle, cfg));
      break;
    case ModelKind::StlCapacity:
      input = build_input_window(series.soh_c(norm.q_nominal), at_cycle, cfg);
      break;
    case ModelKind::StlResistance:
      input = build_input_window(series.soh_r(norm.r_base), at_cycle, cfg);
      break;
  }
  TrajectoryPrediction pred = model_.forward_full(input);
  pred.start_cycle = long(at_cycle);
  return pred;
}

CellTruth extract_truth(const CellSeries& series, const EolThresholds& thr,
                        const SmoothingSpec& smoothing) {
  CellTruth t;
  std::vector<double> cycles(series.capacity.size());
  std::iota(cycles.begin(), cycles.end(), 0.0);
  t.eol80 = eol_cycle(cycles, series.capacity, thr.cap_first,
                      series.q_nominal, true);
  t.eol65 = eol_cycle(cycles, series.capacity, thr.cap_second,
                      series.q_nominal, true);
  t.eol120 =
      eol_cycle(cycles, series.resistance, thr.res_first, series.r_base, false);
  t.eol130 = eol_cycle(cycles, series.resistance, thr.res_second,
                       series.r_base, false);
  try {
    t.knee_cap = knee_offline(cycles, series.capacity, smoothing).knee_cycle;
  } catch (const Error&) {
  }
  try {
    t.knee_res = knee_offline(cycles, series.resistance, smoothing).knee_cycle;
  } catch (const Error&) {
  }
  return t;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<double> median_opt(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return median_of(v);
}

// Point metrics of one predicted trajectory against the cell truth.
void point_metrics(const std::vector<double>& cycles,
                   const std::vector<double>& soh, bool capacity,
                   std::size_t present, const EolThresholds& thr,
                   const CellTruth& truth, double knee_grad,
                   const SmoothingSpec& pred_smoothing, PositionRecord& rec) {
  const double first_thr = capacity ? thr.cap_first : thr.res_first;
  const double second_thr = capacity ? thr.cap_second : thr.res_second;
  const bool falling = capacity;
  rec.pred_eol_first = eol_cycle(cycles, soh, first_thr, 1.0, falling);
  rec.pred_eol_second = eol_cycle(cycles, soh, second_thr, 1.0, falling);
  const auto& true_first = capacity ? truth.eol80 : truth.eol120;
  const auto& true_second = capacity ? truth.eol65 : truth.eol130;
  if (true_first && *true_first > double(present) && rec.pred_eol_first) {
    rec.err_eol_first = std::abs(*rec.pred_eol_first - *true_first);
  }
  if (true_second && *true_second > double(present) && rec.pred_eol_second) {
    rec.err_eol_second = std::abs(*rec.pred_eol_second - *true_second);
  }

  if (knee_grad > 0.0 && cycles.size() >= 3) {
    rec.pred_knee = knee_online(cycles, soh, knee_grad, pred_smoothing);
    const auto& true_knee = capacity ? truth.knee_cap : truth.knee_res;
    if (true_knee && *true_knee > double(present) && rec.pred_knee) {
      rec.err_knee = std::abs(*rec.pred_knee - *true_knee);
    }
  }
}

}  // namespace

ChannelAggregates aggregate_channel(const std::vector<PositionRecord>& records,
                                    char channel) {
  ChannelAggregates agg;
  std::vector<double> mapes, maes, knee_errs, first_errs, second_errs;
  for (const auto& r : records) {
    if (r.channel != channel) continue;
    mapes.push_back(r.mape_pct);
    maes.push_back(r.mae_phys);
    if (r.err_knee) knee_errs.push_back(*r.err_knee);
    if (r.err_eol_first) first_errs.push_back(*r.err_eol_first);
    if (r.err_eol_second) second_errs.push_back(*r.err_eol_second);
  }
  agg.n_curves = mapes.size();
  if (!mapes.empty()) {
    agg.mean_mape =
        std::accumulate(mapes.begin(), mapes.end(), 0.0) / double(mapes.size());
    agg.median_mape = median_of(mapes);
    agg.max_mape = *std::max_element(mapes.begin(), mapes.end());
    agg.mean_mae =
        std::accumulate(maes.begin(), maes.end(), 0.0) / double(maes.size());
    agg.median_mae = median_of(maes);
    agg.max_mae = *std::max_element(maes.begin(), maes.end());
  }
  agg.median_knee_err = median_opt(knee_errs);
  agg.median_eol_first_err = median_opt(first_errs);
  agg.median_eol_second_err = median_opt(second_errs);
  return agg;
}

MetricsReport progression_eval(const TrajectoryPredictor& predictor,
                               const std::vector<CellSeries>& cells,
                               const EvalOptions& options) {
  options.thresholds.validate();
  const ModelConfig& cfg = predictor.predictor_config();
  MetricsReport report;

  for (const auto& cell : cells) {
    CellTruth truth;
    if (auto it = options.truth.find(cell.cell_id); it != options.truth.end()) {
      truth = it->second;
    } else {
      truth = extract_truth(cell, options.thresholds, options.truth_smoothing);
    }
    const std::vector<double> true_soh_c = cell.soh_c(cell.q_nominal);
    const std::vector<double> true_soh_r =
        cell.r_base > 0.0 ? cell.soh_r(cell.r_base) : std::vector<double>{};

    const std::size_t last = cell.last_cycle();
    for (std::size_t present = kMinHistoryCycles;
         present + cfg.out_step_cycles <= last &&
         present <= cfg.max_history_cycles();
         present += options.position_stride) {
      const TrajectoryPrediction pred = predictor.predict_full(cell, present);
      const std::size_t k_true = (last - present) / cfg.out_step_cycles;

      for (int ch = 0; ch < 2; ++ch) {
        const bool capacity = ch == 0;
        const auto& soh_pred = capacity ? pred.capacity : pred.resistance;
        if (soh_pred.empty()) continue;
        const auto& soh_true = capacity ? true_soh_c : true_soh_r;
        if (soh_true.empty()) continue;

        const std::size_t n = std::min(k_true, soh_pred.size());
        if (n == 0) continue;
        std::vector<double> p(n), t(n);
        for (std::size_t j = 0; j < n; ++j) {
          p[j] = soh_pred[j];
          t[j] = soh_true[present + (j + 1) * cfg.out_step_cycles];
        }

        PositionRecord rec;
        rec.cell_id = cell.cell_id;
        rec.present_cycle = present;
        rec.channel = capacity ? 'C' : 'R';
        rec.n_points = n;
        rec.mape_pct = mape(p, t);
        double mae = 0.0;
        for (std::size_t j = 0; j < n; ++j) mae += std::abs(p[j] - t[j]);
        mae /= double(n);
        rec.mae_phys = mae * (capacity ? cell.q_nominal : cell.r_base);

        std::vector<double> cycles(soh_pred.size());
        for (std::size_t j = 0; j < cycles.size(); ++j) {
          cycles[j] = double(present + (j + 1) * cfg.out_step_cycles);
        }
        point_metrics(cycles, soh_pred, capacity, present, options.thresholds,
                      truth,
                      capacity ? options.knee_grad_cap : options.knee_grad_res,
                      options.pred_smoothing, rec);
        report.records.push_back(std::move(rec));
        (capacity ? report.has_capacity : report.has_resistance) = true;
      }
    }
  }

  report.capacity = aggregate_channel(report.records, 'C');
  report.resistance = aggregate_channel(report.records, 'R');
  return report;
}

namespace {

// Routes predictions through noisy input series while the evaluation keeps
// reading truth from the clean ones.
class InputOverridePredictor : public TrajectoryPredictor {
 public:
  InputOverridePredictor(const TrajectoryPredictor& inner,
                         const std::vector<CellSeries>& inputs)
      : inner_(inner) {
    for (const auto& c : inputs) by_id_[c.cell_id] = &c;
  }
  TrajectoryPrediction predict_full(const CellSeries& series,
                                    std::size_t at_cycle) const override {
    const auto it = by_id_.find(series.cell_id);
    return inner_.predict_full(it == by_id_.end() ? series : *it->second,
                               at_cycle);
  }
  const ModelConfig& predictor_config() const override {
    return inner_.predictor_config();
  }

 private:
  const TrajectoryPredictor& inner_;
  std::map<std::string, const CellSeries*> by_id_;
};

}  // namespace

std::vector<std::pair<double, MetricsReport>> noise_sweep(
    const TrajectoryPredictor& predictor, const std::vector<CellSeries>& cells,
    const std::vector<double>& sigma_grid, std::uint64_t noise_seed,
    const EvalOptions& options) {
  std::vector<std::pair<double, MetricsReport>> out;
  for (double sigma : sigma_grid) {
    if (sigma < 0.0) {
      fail(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
    }
    // Noise models diagnosis errors on the inputs only; truth stays clean.
    std::vector<CellSeries> noisy;
    noisy.reserve(cells.size());
    for (const auto& cell : cells) {
      NoiseSpec spec;
      spec.sigma_fraction = sigma;
      // One stream per cell, identical across sigmas.
      spec.seed = SeededRng(noise_seed).split(cell.cell_id).seed();
      noisy.push_back(add_noise(cell, spec));
    }
    InputOverridePredictor shim(predictor, noisy);
    out.emplace_back(sigma, progression_eval(shim, cells, options));
  }
  return out;
}

TimingResult measure_prediction_seconds(const TrajectoryPredictor& predictor,
                                        const std::vector<CellSeries>& cells,
                                        std::size_t n_reps) {
  if (cells.empty()) {
    fail(ErrorCode::InvalidArgument, "timing benchmark needs cells");
  }
  const ModelConfig& cfg = predictor.predictor_config();
  // Warm-up pass, then timed repetitions cycling over the cells.
  std::vector<std::pair<const CellSeries*, std::size_t>> points;
  for (const auto& cell : cells) {
    const std::size_t last =
        std::min(cell.last_cycle(), cfg.max_history_cycles());
    const std::size_t at =
        last - (last % cfg.in_step_cycles);
    if (at >= kMinHistoryCycles) points.emplace_back(&cell, at);
  }
  if (points.empty()) {
    fail(ErrorCode::InvalidArgument, "no cell has enough history to time");
  }
  for (std::size_t i = 0; i < std::min<std::size_t>(points.size(), 3); ++i) {
    (void)predictor.predict_full(*points[i].first, points[i].second);
  }
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < n_reps; ++i) {
    const auto& [cell, at] = points[i % points.size()];
    (void)predictor.predict_full(*cell, at);
  }
  const auto stop = std::chrono::steady_clock::now();
  TimingResult result;
  result.repetitions = n_reps;
  result.mean_seconds =
      std::chrono::duration<double>(stop - start).count() / double(n_reps);
  return result;
}

std::vector<ComparisonRow> compare_mtl_stl(const MetricsReport& mtl,
                                           const MetricsReport& stl_cap,
                                           const MetricsReport& stl_res,
                                           const TimingResult& mtl_time,
                                           const TimingResult& stl_cap_time,
                                           const TimingResult& stl_res_time) {
  auto opt = [](const std::optional<double>& v) { return v.value_or(0.0); };
  const ChannelAggregates& mc = mtl.capacity;
  const ChannelAggregates& mr = mtl.resistance;
  const ChannelAggregates& sc = stl_cap.capacity;
  const ChannelAggregates& sr = stl_res.resistance;
  return {
      {"mean_capacity_curve_mape_pct", sc.mean_mape, mc.mean_mape},
      {"median_capacity_curve_mape_pct", sc.median_mape, mc.median_mape},
      {"max_capacity_curve_mape_pct", sc.max_mape, mc.max_mape},
      {"median_capacity_knee_error_cycles", opt(sc.median_knee_err),
       opt(mc.median_knee_err)},
      {"median_eol80_error_cycles", opt(sc.median_eol_first_err),
       opt(mc.median_eol_first_err)},
      {"median_eol65_error_cycles", opt(sc.median_eol_second_err),
       opt(mc.median_eol_second_err)},
      {"mean_resistance_curve_mape_pct", sr.mean_mape, mr.mean_mape},
      {"median_resistance_curve_mape_pct", sr.median_mape, mr.median_mape},
      {"max_resistance_curve_mape_pct", sr.max_mape, mr.max_mape},
      {"median_resistance_knee_error_cycles", opt(sr.median_knee_err),
       opt(mr.median_knee_err)},
      {"median_eol120_error_cycles", opt(sr.median_eol_first_err),
       opt(mr.median_eol_first_err)},
      {"median_eol130_error_cycles", opt(sr.median_eol_second_err),
       opt(mr.median_eol_second_err)},
      {"mean_computational_cost_s",
       stl_cap_time.mean_seconds + stl_res_time.mean_seconds,
       mtl_time.mean_seconds},
  };
}

const std::array<const char*, 8> DegradationMetricsTable::kColumns = {
    "CapKneeX", "CapKneeY", "ResKneeX", "ResKneeY",
    "EOL80",    "EOL65",    "EOL120",   "EOL130"};

DegradationMetricsTable degradation_metrics(
    const std::vector<CellSeries>& cells, const EolThresholds& thr,
    const SmoothingSpec& smoothing) {
  DegradationMetricsTable table;
  for (const auto& cell : cells) {
    DegradationMetricsRow row;
    row.cell_id = cell.cell_id;
    std::vector<double> cycles(cell.capacity.size());
    std::iota(cycles.begin(), cycles.end(), 0.0);
    try {
      const KneeResult k = knee_offline(cycles, cell.capacity, smoothing);
      row.metrics[0] = k.knee_cycle;
      row.metrics[1] = k.knee_value;
    } catch (const Error&) {
    }
    try {
      const KneeResult k = knee_offline(cycles, cell.resistance, smoothing);
      row.metrics[2] = k.knee_cycle;
      row.metrics[3] = k.knee_value;
    } catch (const Error&) {
    }
    row.metrics[4] = eol_cycle(cycles, cell.capacity, thr.cap_first,
                               cell.q_nominal, true);
    row.metrics[5] = eol_cycle(cycles, cell.capacity, thr.cap_second,
                               cell.q_nominal, true);
    row.metrics[6] =
        eol_cycle(cycles, cell.resistance, thr.res_first, cell.r_base, false);
    row.metrics[7] =
        eol_cycle(cycles, cell.resistance, thr.res_second, cell.r_base, false);
    table.rows.push_back(std::move(row));
  }

  if (table.rows.size() >= 2) {
    std::array<std::array<double, 8>, 8> rho{};
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        std::vector<double> xs, ys;
        for (const auto& row : table.rows) {
          if (row.metrics[std::size_t(a)] && row.metrics[std::size_t(b)]) {
            xs.push_back(*row.metrics[std::size_t(a)]);
            ys.push_back(*row.metrics[std::size_t(b)]);
          }
        }
        rho[std::size_t(a)][std::size_t(b)] =
            (a == b) ? 1.0 : (xs.size() >= 2 ? pearson(xs, ys) : 0.0);
      }
    }
    table.rho = rho;
  }
  return table;
}

}  // namespace bdp
