#include "core/synth.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/kneepoint.hpp"

namespace bdp {

double SynthCellParams::capacity_at(double n) const {
  return q0 * (1.0 - a * n - b * (std::exp(n / tau) - 1.0));
}

double SynthCellParams::resistance_at(double n) const {
  return r0 * (1.0 + c * n + d * (std::exp(n / tau_r) - 1.0));
}

CellSeries synth_cell(const SynthCellParams& p, const std::string& cell_id,
                      double r_base, double trunc_soh_c, double trunc_soh_r) {
  if (!(p.q0 > 0.0) || !(p.r0 > 0.0) || !(p.tau > 0.0) || !(p.tau_r > 0.0) ||
      p.a < 0.0 || p.b < 0.0 || p.c < 0.0 || p.d < 0.0) {
    fail(ErrorCode::InvalidArgument,
         "synthetic cell parameters out of range for " + cell_id);
  }
  CellSeries series;
  series.cell_id = cell_id;
  // Hard cap well past any plausible truncation; guards bad parameters.
  const std::size_t n_max = 20000;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double q = p.capacity_at(double(n));
    const double r = p.resistance_at(double(n));
    if (q / kNominalCapacityAh < trunc_soh_c || r / r_base > trunc_soh_r) {
      break;
    }
    if (!(q > 0.0) || !(r > 0.0)) {
      fail(ErrorCode::Numeric,
           "non-physical synthetic curve for " + cell_id);
    }
    series.capacity.push_back(q);
    series.resistance.push_back(r);
  }
  if (series.capacity.size() < 2 || series.capacity.size() > n_max) {
    fail(ErrorCode::InvalidArgument,
         "synthetic parameters produce a degenerate lifetime for " + cell_id);
  }
  series.validate();
  return series;
}

std::optional<double> analytic_crossing(const SynthCellParams& p, bool capacity,
                                        double threshold_abs, double n_max) {
  auto value = [&](double n) {
    return capacity ? p.capacity_at(n) : p.resistance_at(n);
  };
  // Falling curve for capacity, rising for resistance.
  const double v0 = value(0.0);
  const double vend = value(n_max);
  const bool falling = capacity;
  auto crossed = [&](double v) {
    return falling ? (v <= threshold_abs) : (v >= threshold_abs);
  };
  if (crossed(v0)) return 0.0;
  if (!crossed(vend)) return std::nullopt;
  double lo = 0.0, hi = n_max;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (crossed(value(mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SynthGroundTruth ground_truth_for(const SynthCellParams& p,
                                  const CellSeries& series, double r_base) {
  SynthGroundTruth gt;
  gt.cell_id = series.cell_id;
  gt.r_base = r_base;
  const double n_data = double(series.last_cycle());

  std::vector<double> cycles(series.capacity.size());
  for (std::size_t i = 0; i < cycles.size(); ++i) cycles[i] = double(i);

  if (auto knee = dense_max_curvature_knee(cycles, series.capacity)) {
    gt.knee_cap_cycle = *knee;
    gt.knee_cap_value_ah = series.capacity[std::size_t(*knee)];
  }
  if (auto knee = dense_max_curvature_knee(cycles, series.resistance)) {
    gt.knee_res_cycle = *knee;
    gt.knee_res_value_mohm = series.resistance[std::size_t(*knee)];
  }

  gt.eol80 = analytic_crossing(p, true, 0.80 * kNominalCapacityAh, n_data);
  gt.eol65 = analytic_crossing(p, true, 0.65 * kNominalCapacityAh, n_data);
  gt.eol120 = analytic_crossing(p, false, 1.20 * r_base, n_data);
  gt.eol130 = analytic_crossing(p, false, 1.30 * r_base, n_data);
  return gt;
}

SynthFleet synth_fleet(const SynthFleetParams& params, std::uint64_t seed) {
  if (params.n_cells < 1) {
    fail(ErrorCode::InvalidArgument, "n_cells must be >= 1");
  }
  SeededRng rng = SeededRng(seed).split("synth-fleet");
  SynthFleet fleet;
  fleet.r_base = params.r_center;

  for (std::size_t i = 0; i < params.n_cells; ++i) {
    const double life_scale =
        rng.uniform(1.0 - params.life_spread, 1.0 + params.life_spread);
    const double life = params.life_base * life_scale;

    SynthCellParams p;
    p.q0 = kNominalCapacityAh * rng.uniform(0.99, 1.01);
    p.tau = life * rng.uniform(0.14, 0.17);
    // Linear part carries 18..30% of the total fade; the knee does the rest.
    p.a = (0.4 / life) * rng.uniform(0.18, 0.30);
    const double exp_cap = std::exp(life / p.tau) - 1.0;
    p.b = (1.0 - p.a * life -
           params.trunc_soh_c * kNominalCapacityAh / p.q0) /
          exp_cap;

    p.r0 = params.r_center * rng.uniform(0.99, 1.01);
    p.tau_r = p.tau * rng.uniform(0.96, 1.04);
    p.c = (0.25 / life) * rng.uniform(0.30, 0.50);
    // Aim the resistance rise slightly past its truncation bound at the
    // capacity end of life, so all four EOL crossings land inside the data.
    const double soh_r_at_life = rng.uniform(1.37, 1.42);
    const double exp_res = std::exp(life / p.tau_r) - 1.0;
    p.d = (soh_r_at_life * params.r_center / p.r0 - 1.0 - p.c * life) /
          exp_res;
    if (p.b <= 0.0 || p.d <= 0.0) {
      fail(ErrorCode::InvalidArgument,
           "synthetic fleet parameters out of range");
    }

    const std::string id =
        "synth" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1);
    CellSeries series = synth_cell(p, id, params.r_center, params.trunc_soh_c,
                                   params.trunc_soh_r);
    fleet.truth.push_back(ground_truth_for(p, series, params.r_center));
    fleet.cells.push_back(std::move(series));
  }
  return fleet;
}

}  // namespace bdp
