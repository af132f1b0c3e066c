#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tqsb {

/// 17 significant digits, enough to round-trip any double; "nan", "inf" and
/// "-inf" for non-finite values.
std::string format_double(double value);

/// Inverse of format_double. Throws Errc::InvalidConfig on malformed input.
double parse_double(const std::string& text);

struct CsvTable {
  std::vector<std::string> comments;  // written as "# ..." lines first
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by header name; throws Errc::InvalidConfig when missing.
  std::size_t column(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
};

/// Fields containing commas, quotes or newlines are quoted.
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

}  // namespace tqsb
