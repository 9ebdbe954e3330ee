#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/series.hpp"

namespace bdp {

// Closed-form degradation law of one synthetic cell:
//   q(n) = q0 * (1 - a*n - b*(e^{n/tau} - 1))            [Ah]
//   r(n) = r0 * (1 + c*n + d*(e^{n/tau_r} - 1))          [mOhm]
// The exponential term produces an emergent knee; a/c set the early linear
// regime. b = d = 0 degrades linearly and has no knee.
struct SynthCellParams {
  double q0 = kNominalCapacityAh;
  double a = 1e-4;
  double b = 3e-4;
  double tau = 115.0;
  double r0 = 30.0;
  double c = 1.1e-4;
  double d = 2.6e-4;
  double tau_r = 115.0;

  double capacity_at(double n) const;
  double resistance_at(double n) const;
};

// Fleet-level generator knobs. Lifetimes scatter through `life_spread`
// around `life_base`, which manufactures the inter-cell variance the
// acceptance fleet needs.
struct SynthFleetParams {
  std::size_t n_cells = 48;
  double life_base = 780.0;
  double life_spread = 0.18;    // +- fraction of life_base
  double r_center = 30.0;       // mOhm, fleet design center
  double trunc_soh_c = 0.60;    // series ends when SOH-C drops below this
  double trunc_soh_r = 1.35;    // ... or SOH-R rises above this
};

// Ground-truth degradation metrics recorded at generation time via the
// dense curvature / analytic crossing oracles.
struct SynthGroundTruth {
  std::string cell_id;
  std::optional<double> knee_cap_cycle;
  std::optional<double> knee_cap_value_ah;
  std::optional<double> knee_res_cycle;
  std::optional<double> knee_res_value_mohm;
  std::optional<double> eol80;
  std::optional<double> eol65;
  std::optional<double> eol120;
  std::optional<double> eol130;
  double r_base = 0.0;  // base used for the resistance thresholds
};

struct SynthFleet {
  std::vector<CellSeries> cells;
  std::vector<SynthGroundTruth> truth;
  double r_base = 0.0;  // generator design center, mOhm
};

// Per-cycle series for one parameter set, truncated at the SOH bounds.
CellSeries synth_cell(const SynthCellParams& p, const std::string& cell_id,
                      double r_base, double trunc_soh_c, double trunc_soh_r);

// Exact threshold crossing of the closed-form law via bisection.
std::optional<double> analytic_crossing(const SynthCellParams& p, bool capacity,
                                        double threshold_abs, double n_max);

SynthGroundTruth ground_truth_for(const SynthCellParams& p,
                                  const CellSeries& series, double r_base);

// Seeded fleet with per-cell parameters drawn from narrow coupled
// distributions; identical seed gives a bit-identical fleet.
SynthFleet synth_fleet(const SynthFleetParams& params, std::uint64_t seed);

}  // namespace bdp
