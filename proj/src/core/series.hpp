#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace bdp {

inline constexpr double kNominalCapacityAh = 1.85;

// One laboratory checkup measurement.
struct CheckupRecord {
  std::string cell_id;
  std::size_t cycle = 0;
  double capacity_ah = 0.0;
  double resistance_mohm = 0.0;
};

// Per-cycle interpolated degradation history of one cell. Cycle i is index i;
// the series always starts at cycle 0.
class CellSeries {
 public:
  std::string cell_id;
  std::vector<double> capacity;    // Ah, one entry per cycle
  std::vector<double> resistance;  // mOhm
  double q_nominal = kNominalCapacityAh;
  double r_base = 0.0;  // fleet mean initial resistance; 0 until assigned

  std::size_t last_cycle() const { return capacity.size() - 1; }

  std::vector<double> soh_c(double q_nom) const;
  std::vector<double> soh_r(double r_base_mohm) const;

  void validate() const;
};

// Parses the checkup CSV (header: cell_id,cycle,capacity_ah,resistance_mohm).
// Records are grouped by cell, cells sorted by id; within a cell the file
// must list strictly increasing cycles and positive values.
std::vector<CheckupRecord> load_checkups(const std::string& path);

// PCHIP-interpolates one cell's checkups onto every integer cycle. Requires
// at least 3 checkups, the first at cycle 0; never extrapolates.
CellSeries interpolate_pchip(const std::vector<CheckupRecord>& checkups);

// Mean cycle-0 resistance across the given cells.
double fleet_mean_initial_resistance(const std::vector<CellSeries>& cells);

struct SohSeries {
  std::vector<double> soh_c, soh_r;
};

// Dimensionless SOH view of a series; requires r_base > 0 on the series.
SohSeries normalize(const CellSeries& series);
CellSeries denormalize(const SohSeries& soh, const CellSeries& like);

struct NoiseSpec {
  double sigma_fraction = 0.0;  // relative to each channel's initial value
  std::uint64_t seed = 0;

  void validate() const;
};

// Adds i.i.d. Gaussian measurement noise to both channels; the standard
// deviation per channel is sigma_fraction times that channel's cycle-0
// value. Deterministic for a given seed; identity when sigma_fraction == 0.
CellSeries add_noise(const CellSeries& series, const NoiseSpec& spec);

// Series cache I/O: one CSV per cell at 1-cycle resolution with header
// cycle,capacity_ah,resistance_mohm. Round-trip exact.
void write_series_csv(const CellSeries& series, const std::string& path);
CellSeries read_series_csv(const std::string& path, const std::string& cell_id);

}  // namespace bdp
