#include "core/io_util.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace bdp {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, bool& ok) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  ok = (res.ec == std::errc{} && res.ptr == end && !s.empty());
  return v;
}

long parse_long(const std::string& s, bool& ok) {
  long v = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  ok = (res.ec == std::errc{} && res.ptr == end && !s.empty());
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::Io, "cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorCode::Io, "cannot write file: " + path);
  }
  out << content;
  if (!out) {
    fail(ErrorCode::Io, "write failed: " + path);
  }
}

std::string CsvTable::to_string() const {
  std::ostringstream ss;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) ss << ',';
    ss << header[i];
  }
  ss << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) ss << ',';
      ss << row[i];
    }
    ss << '\n';
  }
  return ss.str();
}

void write_csv(const CsvTable& table, const std::string& path) {
  write_text_file(path, table.to_string());
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[std::size_t(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace bdp
