#pragma once

// Schema-stable CSV output: fixed header per table, comma separators, LF
// line endings, numbers at 9 significant digits.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "intervalci/errors.hpp"

namespace intervalci {

/// Formats a double with 9 significant digits; infinities print as inf/-inf.
inline std::string fmt_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::string(buf);
}

inline std::string fmt_int(std::int64_t v) { return std::to_string(v); }
inline std::string fmt_uint(std::uint64_t v) { return std::to_string(v); }

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row) {
    if (row.size() != header_.size())
      throw DomainError("csv: row width does not match header");
    rows_.push_back(std::move(row));
  }

  std::size_t row_count() const { return rows_.size(); }

  std::string to_string() const {
    std::string out = join(header_);
    for (const auto& r : rows_) {
      out += '\n';
      out += join(r);
    }
    out += '\n';
    return out;
  }

 private:
  static std::string join(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) line += ',';
      line += fields[i];
    }
    return line;
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace intervalci
