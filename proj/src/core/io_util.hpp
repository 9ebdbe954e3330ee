#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bdp {

// Shortest round-trip decimal form of a double (std::to_chars); every float
// written to CSV/JSON goes through this so re-runs are byte-identical.
std::string format_double(double v);

double parse_double(const std::string& s, bool& ok);
long parse_long(const std::string& s, bool& ok);

std::vector<std::string> split_csv_line(const std::string& line);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Simple CSV table: rows of string cells under a fixed header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

void write_csv(const CsvTable& table, const std::string& path);

std::string hex64(std::uint64_t v);

}  // namespace bdp
