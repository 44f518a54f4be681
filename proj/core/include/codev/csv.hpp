#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codev::csv {

// Splits one delimited line. Fields are plain (no quoting); asset and
// project identifiers never contain the delimiter.
std::vector<std::string> split(std::string_view line, char delim = ',');

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or -1.
  int column(std::string_view name) const;
};

Table read_table(std::istream& in, char delim = ',');

// Empty cell or unparseable number -> nullopt.
std::optional<double> parse_double(std::string_view s);

std::string format_double(double v);

}  // namespace codev::csv
