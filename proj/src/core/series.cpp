#include "core/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "core/errors.hpp"
#include "core/io_util.hpp"
#include "core/pchip.hpp"

namespace bdp {

std::vector<double> CellSeries::soh_c(double q_nom) const {
  if (!(q_nom > 0.0)) {
    fail(ErrorCode::InvalidArgument, "q_nominal must be positive");
  }
  std::vector<double> out(capacity.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = capacity[i] / q_nom;
  return out;
}

std::vector<double> CellSeries::soh_r(double r_base_mohm) const {
  if (!(r_base_mohm > 0.0)) {
    fail(ErrorCode::InvalidArgument, "r_base must be positive");
  }
  std::vector<double> out(resistance.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = resistance[i] / r_base_mohm;
  return out;
}

void CellSeries::validate() const {
  if (capacity.empty() || capacity.size() != resistance.size()) {
    fail(ErrorCode::Dimension,
         "cell " + cell_id + ": capacity/resistance lengths disagree");
  }
  for (std::size_t i = 0; i < capacity.size(); ++i) {
    if (!std::isfinite(capacity[i]) || !(capacity[i] > 0.0) ||
        !std::isfinite(resistance[i]) || !(resistance[i] > 0.0)) {
      fail(ErrorCode::Numeric, "cell " + cell_id +
                                   ": non-positive or non-finite value at "
                                   "cycle " +
                                   std::to_string(i));
    }
  }
  if (std::abs(capacity[0] - q_nominal) > 0.2 * q_nominal) {
    fail(ErrorCode::InvalidArgument,
         "cell " + cell_id + ": initial capacity " +
             format_double(capacity[0]) + " Ah is more than 20% away from "
             "nominal " +
             format_double(q_nominal) + " Ah");
  }
}

std::vector<CheckupRecord> load_checkups(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorCode::Parse, path + ": empty file");
  }
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected = {"cell_id", "cycle", "capacity_ah",
                                             "resistance_mohm"};
  if (std::vector<std::string>(header.begin(), header.end()) != expected) {
    fail(ErrorCode::Parse, path + ": bad header, expected "
                                   "cell_id,cycle,capacity_ah,resistance_mohm");
  }

  std::vector<CheckupRecord> records;
  std::map<std::string, std::size_t> last_cycle;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) {
      fail(ErrorCode::Parse, path + ": row " + std::to_string(row) +
                                 " has " + std::to_string(cells.size()) +
                                 " fields, expected 4");
    }
    CheckupRecord rec;
    rec.cell_id = cells[0];
    bool ok = false;
    const long cyc = parse_long(cells[1], ok);
    if (!ok || cyc < 0) {
      fail(ErrorCode::Parse,
           path + ": row " + std::to_string(row) + ": bad cycle");
    }
    rec.cycle = std::size_t(cyc);
    rec.capacity_ah = parse_double(cells[2], ok);
    if (!ok || !(rec.capacity_ah > 0.0)) {
      fail(ErrorCode::Parse, path + ": row " + std::to_string(row) +
                                 ": capacity must be a positive number");
    }
    rec.resistance_mohm = parse_double(cells[3], ok);
    if (!ok || !(rec.resistance_mohm > 0.0)) {
      fail(ErrorCode::Parse, path + ": row " + std::to_string(row) +
                                 ": resistance must be a positive number");
    }
    auto it = last_cycle.find(rec.cell_id);
    if (it != last_cycle.end() && rec.cycle <= it->second) {
      fail(ErrorCode::Parse, path + ": row " + std::to_string(row) +
                                 ": cell " + rec.cell_id +
                                 " cycles not strictly increasing (cycle " +
                                 std::to_string(rec.cycle) + ")");
    }
    last_cycle[rec.cell_id] = rec.cycle;
    records.push_back(std::move(rec));
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const CheckupRecord& a, const CheckupRecord& b) {
                     return a.cell_id < b.cell_id;
                   });
  return records;
}

CellSeries interpolate_pchip(const std::vector<CheckupRecord>& checkups) {
  if (checkups.size() < 3) {
    fail(ErrorCode::InvalidArgument,
         "need at least 3 checkups to interpolate, got " +
             std::to_string(checkups.size()));
  }
  const std::string& id = checkups.front().cell_id;
  std::vector<double> x, qc, rc;
  for (const auto& rec : checkups) {
    if (rec.cell_id != id) {
      fail(ErrorCode::InvalidArgument,
           "interpolate_pchip got records from several cells");
    }
    x.push_back(double(rec.cycle));
    qc.push_back(rec.capacity_ah);
    rc.push_back(rec.resistance_mohm);
  }
  if (checkups.front().cycle != 0) {
    fail(ErrorCode::InvalidArgument,
         "cell " + id + ": first checkup must be at cycle 0");
  }

  CellSeries series;
  series.cell_id = id;
  series.capacity = PchipInterpolant(x, qc).evaluate_integer_grid();
  series.resistance = PchipInterpolant(x, rc).evaluate_integer_grid();
  series.validate();
  return series;
}

double fleet_mean_initial_resistance(const std::vector<CellSeries>& cells) {
  if (cells.empty()) {
    fail(ErrorCode::InvalidArgument, "no cells for r_base");
  }
  double sum = 0.0;
  for (const auto& c : cells) sum += c.resistance.at(0);
  return sum / double(cells.size());
}

SohSeries normalize(const CellSeries& series) {
  if (!(series.r_base > 0.0)) {
    fail(ErrorCode::InvalidArgument,
         "cell " + series.cell_id + ": r_base not set");
  }
  SohSeries out;
  out.soh_c = series.soh_c(series.q_nominal);
  out.soh_r = series.soh_r(series.r_base);
  return out;
}

CellSeries denormalize(const SohSeries& soh, const CellSeries& like) {
  if (!(like.r_base > 0.0)) {
    fail(ErrorCode::InvalidArgument, "r_base not set");
  }
  CellSeries out = like;
  out.capacity.resize(soh.soh_c.size());
  out.resistance.resize(soh.soh_r.size());
  for (std::size_t i = 0; i < soh.soh_c.size(); ++i)
    out.capacity[i] = soh.soh_c[i] * like.q_nominal;
  for (std::size_t i = 0; i < soh.soh_r.size(); ++i)
    out.resistance[i] = soh.soh_r[i] * like.r_base;
  return out;
}

void NoiseSpec::validate() const {
  if (!(sigma_fraction >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "sigma_fraction must be >= 0");
  }
}

CellSeries add_noise(const CellSeries& series, const NoiseSpec& spec) {
  spec.validate();
  if (spec.sigma_fraction == 0.0) return series;
  CellSeries out = series;
  SeededRng rng(spec.seed);
  const double sd_c = spec.sigma_fraction * series.capacity.at(0);
  const double sd_r = spec.sigma_fraction * series.resistance.at(0);
  for (auto& v : out.capacity) v += rng.normal(0.0, sd_c);
  for (auto& v : out.resistance) v += rng.normal(0.0, sd_r);
  return out;
}

void write_series_csv(const CellSeries& series, const std::string& path) {
  CsvTable table;
  table.header = {"cycle", "capacity_ah", "resistance_mohm"};
  for (std::size_t i = 0; i < series.capacity.size(); ++i) {
    table.rows.push_back({std::to_string(i), format_double(series.capacity[i]),
                          format_double(series.resistance[i])});
  }
  write_csv(table, path);
}

CellSeries read_series_csv(const std::string& path,
                           const std::string& cell_id) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) !=
          std::vector<std::string>{"cycle", "capacity_ah", "resistance_mohm"}) {
    fail(ErrorCode::Parse, path + ": bad series header");
  }
  CellSeries series;
  series.cell_id = cell_id;
  std::size_t row = 1, expect = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) {
      fail(ErrorCode::Parse, path + ": row " + std::to_string(row));
    }
    bool ok1 = false, ok2 = false, ok3 = false;
    const long cyc = parse_long(cells[0], ok1);
    const double q = parse_double(cells[1], ok2);
    const double r = parse_double(cells[2], ok3);
    if (!ok1 || !ok2 || !ok3 || cyc != long(expect)) {
      fail(ErrorCode::Parse, path + ": row " + std::to_string(row) +
                                 ": series must list consecutive cycles "
                                 "starting at 0");
    }
    ++expect;
    series.capacity.push_back(q);
    series.resistance.push_back(r);
  }
  series.validate();
  return series;
}

}  // namespace bdp
